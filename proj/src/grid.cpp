#include "thetactl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thetactl/errors.hpp"

namespace thetactl {

void GridSpec::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("grid: " + what); };
  if (n_modes < 8 || n_modes % 2 != 0) fail("n_modes must be even and >= 8");
  if (n_eta < 1) fail("n_eta must be >= 1");
  if (!std::isfinite(eta_min) || !std::isfinite(eta_max)) fail("eta bounds must be finite");
  if (eta_min > eta_max) fail("eta_min > eta_max");
  if (n_eta > 1 && eta_min == eta_max) fail("n_eta > 1 requires eta_min < eta_max");
  if (!std::isfinite(horizon) || horizon < 0.0) fail("horizon must be finite and non-negative");
  if (n_steps < 1) fail("n_steps must be >= 1");
}

double GridSpec::eta(int j) const {
  if (n_eta == 1) return 0.5 * (eta_min + eta_max);
  return eta_min + (eta_max - eta_min) * j / (n_eta - 1);
}

double GridSpec::eta_weight(int j) const {
  const double span = eta_span();
  if (n_eta == 1) return span > 0.0 ? span : 1.0;
  const double h = span / (n_eta - 1);
  return (j == 0 || j == n_eta - 1) ? 0.5 * h : h;
}

double GridSpec::max_abs_eta() const { return std::max(std::abs(eta_min), std::abs(eta_max)); }

int GridSpec::retained_wavenumber() const { return dealias ? n_modes / 3 : n_modes / 2; }

GridSpec desk_grid() {
  GridSpec g;
  g.n_modes = 128;
  g.n_eta = 51;
  g.eta_min = 0.0;
  g.eta_max = 1.0;
  g.horizon = 6.0;
  g.n_steps = 1200;
  return g;
}

GridSpec paper_grid() {
  GridSpec g;
  g.n_modes = 512;
  g.n_eta = 501;
  g.eta_min = 0.0;
  g.eta_max = 1.0;
  g.horizon = 6.0;
  g.n_steps = 3000;
  return g;
}

}  // namespace thetactl
