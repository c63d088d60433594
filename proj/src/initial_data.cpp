#include "thetactl/initial_data.hpp"

#include <algorithm>
#include <cmath>

#include "thetactl/errors.hpp"

namespace thetactl {

PhysicalField paper_cossin2_density(const GridSpec& grid) {
  return PhysicalField::sample(grid, [](double theta, double eta) {
    return (2.0 + 3.0 * std::cos(2.0 * theta) - 2.0 * std::sin(2.0 * theta)) * eta;
  });
}

PhysicalField paper_clipped_density(const GridSpec& grid) {
  PhysicalField f = paper_cossin2_density(grid);
  for (double& v : f.data()) v = std::max(v, 0.0);
  return f;
}

PhysicalField uniform_density(const GridSpec& grid) {
  const double span = grid.eta_span() > 0.0 ? grid.eta_span() : 1.0;
  return PhysicalField(grid, 1.0 / (kTwoPi * span));
}

PhysicalField von_mises_density(const GridSpec& grid, double kappa, double mean) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw ConfigError("vonmises: kappa must be finite and >= 0");
  }
  const double span = grid.eta_span() > 0.0 ? grid.eta_span() : 1.0;
  // exp(kappa (cos - 1)) / I0e(kappa) avoids overflow for large kappa.
  const double scaled_i0 = std::cyl_bessel_i(0.0, kappa) * std::exp(-kappa);
  const double norm = 1.0 / (kTwoPi * scaled_i0 * span);
  return PhysicalField::sample(grid, [&](double theta, double) {
    return norm * std::exp(kappa * (std::cos(theta - mean) - 1.0));
  });
}

NegativeNode most_negative_node(const PhysicalField& density) {
  NegativeNode worst;
  for (int j = 0; j < density.n_eta(); ++j) {
    for (int m = 0; m < density.n_modes(); ++m) {
      if (density(j, m) < worst.value) worst = NegativeNode{density(j, m), j, m};
    }
  }
  return worst;
}

}  // namespace thetactl
