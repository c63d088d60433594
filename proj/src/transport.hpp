#pragma once

#include <vector>

#include "thetactl/grid.hpp"
#include "thetactl/spectral.hpp"

namespace thetactl::detail {

/// Pseudospectral evaluation of -d/dtheta(v f) with
/// v = (1 - cos theta) + (1 + cos theta)(u + w(theta, eta) + eta).
/// Owns its scratch buffers; one instance per thread.
class TransportOperator {
 public:
  explicit TransportOperator(const GridSpec& grid);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }

  /// Nodal values without the Hermitian check of to_physical().
  void to_physical(const SpectralField& f, PhysicalField& out) const;

  /// `w` may be null (ensemble control only).
  void apply_physical(const PhysicalField& f, double u, const PhysicalField* w,
                      SpectralField& out);
  void apply(const SpectralField& f, double u, const PhysicalField* w, SpectralField& out);

  /// Sum_j w_j (2 pi / M) Sum_m mu xi (1 + cos theta_m), fixed order.
  [[nodiscard]] double pairing(const PhysicalField& mu, const PhysicalField& xi) const;

  /// Sum_j w_j (2 pi / M) Sum_m mu * g(m) where g is nodal (e.g. w^2).
  [[nodiscard]] double weighted_sum(const PhysicalField& mu, const PhysicalField& g) const;

  [[nodiscard]] double one_plus_cos(int m) const { return one_plus_cos_[static_cast<std::size_t>(m)]; }

 private:
  GridSpec grid_;
  std::vector<double> one_minus_cos_;
  std::vector<double> one_plus_cos_;
  PhysicalField nodal_;
  std::vector<double> product_;
  std::vector<Complex> product_coeffs_;
};

/// Classical four-stage Runge-Kutta with preallocated stage storage.
class Rk4 {
 public:
  explicit Rk4(const GridSpec& grid) : k1_(grid), k2_(grid), k3_(grid), k4_(grid), stage_(grid) {}

  /// Advances f from t to t + h. rhs(state, time, out) writes df/dt.
  template <class Rhs>
  void step(SpectralField& f, double t, double h, Rhs&& rhs) {
    rhs(static_cast<const SpectralField&>(f), t, k1_);
    combine(f, k1_, 0.5 * h);
    rhs(static_cast<const SpectralField&>(stage_), t + 0.5 * h, k2_);
    combine(f, k2_, 0.5 * h);
    rhs(static_cast<const SpectralField&>(stage_), t + 0.5 * h, k3_);
    combine(f, k3_, h);
    rhs(static_cast<const SpectralField&>(stage_), t + h, k4_);

    auto out = f.data();
    auto a = k1_.data();
    auto b = k2_.data();
    auto c = k3_.data();
    auto d = k4_.data();
    const double sixth = h / 6.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] += sixth * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
    }
  }

 private:
  void combine(const SpectralField& f, const SpectralField& k, double h) {
    auto s = stage_.data();
    auto base = f.data();
    auto slope = k.data();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = base[i] + h * slope[i];
  }

  SpectralField k1_, k2_, k3_, k4_, stage_;
};

}  // namespace thetactl::detail
