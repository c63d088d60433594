#include "transport.hpp"

#include <cmath>

namespace thetactl::detail {

TransportOperator::TransportOperator(const GridSpec& grid)
    : grid_(grid),
      one_minus_cos_(static_cast<std::size_t>(grid.n_modes)),
      one_plus_cos_(static_cast<std::size_t>(grid.n_modes)),
      nodal_(grid),
      product_(static_cast<std::size_t>(grid.n_modes)),
      product_coeffs_(static_cast<std::size_t>(grid.n_modes)) {
  for (int m = 0; m < grid.n_modes; ++m) {
    const double c = std::cos(grid.theta(m));
    one_minus_cos_[static_cast<std::size_t>(m)] = 1.0 - c;
    one_plus_cos_[static_cast<std::size_t>(m)] = 1.0 + c;
  }
}

void TransportOperator::to_physical(const SpectralField& f, PhysicalField& out) const {
  for (int j = 0; j < grid_.n_eta; ++j) slice_to_physical(f.slice(j), out.slice(j));
}

void TransportOperator::apply_physical(const PhysicalField& f, double u, const PhysicalField* w,
                                       SpectralField& out) {
  const int n = grid_.n_modes;
  const int half = n / 2;
  const int kmax = grid_.retained_wavenumber();
  for (int j = 0; j < grid_.n_eta; ++j) {
    const double eta = grid_.eta(j);
    auto values = f.slice(j);
    if (w == nullptr) {
      for (int m = 0; m < n; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        const double v = one_minus_cos_[mi] + one_plus_cos_[mi] * (u + eta);
        product_[mi] = v * values[mi];
      }
    } else {
      auto control = w->slice(j);
      for (int m = 0; m < n; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        const double v = one_minus_cos_[mi] + one_plus_cos_[mi] * ((u + control[mi]) + eta);
        product_[mi] = v * values[mi];
      }
    }
    slice_to_spectral(product_, product_coeffs_);

    auto d = out.slice(j);
    d[0] = Complex(0.0, 0.0);
    d[static_cast<std::size_t>(half)] = Complex(0.0, 0.0);
    for (int k = 1; k < half; ++k) {
      const auto ki = static_cast<std::size_t>(k);
      const auto neg = static_cast<std::size_t>(n - k);
      if (k <= kmax) {
        const Complex p = product_coeffs_[ki];
        const Complex dk(k * p.imag(), -k * p.real());  // -i k p
        d[ki] = dk;
        d[neg] = std::conj(dk);
      } else {
        d[ki] = Complex(0.0, 0.0);
        d[neg] = Complex(0.0, 0.0);
      }
    }
  }
}

void TransportOperator::apply(const SpectralField& f, double u, const PhysicalField* w,
                              SpectralField& out) {
  to_physical(f, nodal_);
  apply_physical(nodal_, u, w, out);
}

double TransportOperator::pairing(const PhysicalField& mu, const PhysicalField& xi) const {
  const double dtheta = kTwoPi / grid_.n_modes;
  double total = 0.0;
  for (int j = 0; j < grid_.n_eta; ++j) {
    auto a = mu.slice(j);
    auto b = xi.slice(j);
    double s = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) s += a[m] * b[m] * one_plus_cos_[m];
    total += grid_.eta_weight(j) * dtheta * s;
  }
  return total;
}

double TransportOperator::weighted_sum(const PhysicalField& mu, const PhysicalField& g) const {
  const double dtheta = kTwoPi / grid_.n_modes;
  double total = 0.0;
  for (int j = 0; j < grid_.n_eta; ++j) {
    auto a = mu.slice(j);
    auto b = g.slice(j);
    double s = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) s += a[m] * b[m];
    total += grid_.eta_weight(j) * dtheta * s;
  }
  return total;
}

}  // namespace thetactl::detail
