#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "thetactl/grid.hpp"

namespace thetactl {

using Complex = std::complex<double>;

/// Fourier coefficients of a theta-periodic field, one block of n_modes
/// coefficients per eta node:  f(theta, eta_j) = sum_k c_k(eta_j) e^{i k theta}
/// with k in {-M/2, ..., M/2 - 1}.
///
/// Each slice is stored contiguously in FFT order (k >= 0 first, then the
/// negative wavenumbers), so slices can be advanced independently.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(int n_eta, int n_modes);
  explicit SpectralField(const GridSpec& grid) : SpectralField(grid.n_eta, grid.n_modes) {}

  [[nodiscard]] int n_eta() const { return n_eta_; }
  [[nodiscard]] int n_modes() const { return n_modes_; }
  [[nodiscard]] bool matches(const GridSpec& grid) const {
    return n_eta_ == grid.n_eta && n_modes_ == grid.n_modes;
  }

  [[nodiscard]] std::span<Complex> slice(int j);
  [[nodiscard]] std::span<const Complex> slice(int j) const;
  [[nodiscard]] std::span<Complex> data() { return coeffs_; }
  [[nodiscard]] std::span<const Complex> data() const { return coeffs_; }

  /// Coefficient of signed wavenumber k in slice j.
  [[nodiscard]] Complex coeff(int j, int k) const;
  void set_coeff(int j, int k, Complex value);

  /// max |c_{-k} - conj(c_k)| over all representable pairs, plus |Im c_0|
  /// and |Im c_{-M/2}|.
  [[nodiscard]] double hermitian_asymmetry() const;
  [[nodiscard]] double max_abs() const;
  [[nodiscard]] bool all_finite() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator*=(double factor);
  /// this += factor * other
  void add_scaled(const SpectralField& other, double factor);

  static int storage_index(int k, int n_modes) { return k >= 0 ? k : k + n_modes; }

 private:
  int n_eta_ = 0;
  int n_modes_ = 0;
  std::vector<Complex> coeffs_;
};

/// Real values at the collocation nodes (theta_m, eta_j), eta-major.
class PhysicalField {
 public:
  PhysicalField() = default;
  PhysicalField(int n_eta, int n_modes, double fill = 0.0);
  explicit PhysicalField(const GridSpec& grid, double fill = 0.0)
      : PhysicalField(grid.n_eta, grid.n_modes, fill) {}

  [[nodiscard]] int n_eta() const { return n_eta_; }
  [[nodiscard]] int n_modes() const { return n_modes_; }
  [[nodiscard]] bool matches(const GridSpec& grid) const {
    return n_eta_ == grid.n_eta && n_modes_ == grid.n_modes;
  }

  double& operator()(int j, int m) { return values_[index(j, m)]; }
  double operator()(int j, int m) const { return values_[index(j, m)]; }
  [[nodiscard]] std::span<double> slice(int j);
  [[nodiscard]] std::span<const double> slice(int j) const;
  [[nodiscard]] std::span<double> data() { return values_; }
  [[nodiscard]] std::span<const double> data() const { return values_; }

  /// Fills with f(theta_m, eta_j).
  static PhysicalField sample(const GridSpec& grid, const std::function<double(double, double)>& f);

 private:
  [[nodiscard]] std::size_t index(int j, int m) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_modes_) +
           static_cast<std::size_t>(m);
  }

  int n_eta_ = 0;
  int n_modes_ = 0;
  std::vector<double> values_;
};

using Weight = std::function<double(double theta, double eta)>;

/// Per-slice discrete Fourier transform. Throws ConfigError on shape mismatch.
SpectralField to_spectral(const PhysicalField& f, const GridSpec& grid);

/// Inverse of to_spectral. Throws NumericError when the coefficients are not
/// Hermitian to within 1e-12 (relative to max(1, max|c|)).
PhysicalField to_physical(const SpectralField& f, const GridSpec& grid);

/// Sum_j w_j (2 pi / M) Sum_m f(theta_m, eta_j) weight(theta_m, eta_j).
double integrate(const SpectralField& f, const Weight& weight, const GridSpec& grid);

/// Same quadrature applied to nodal values.
double integrate(const PhysicalField& f, const Weight& weight, const GridSpec& grid);

/// 2 pi Re c_0(eta_j).
double slice_mass(const SpectralField& f, int j);

/// Sum_j w_j * slice_mass(f, j); equals integrate(f, 1) without a transform.
double total_mass(const SpectralField& f, const GridSpec& grid);

/// Rescales f to unit total mass. Throws ConfigError when the mass is not
/// positive.
void normalize_mass(SpectralField& f, const GridSpec& grid);

namespace detail {

/// Single-slice transforms on raw spans of length M (to_spectral) and M
/// (to_physical; only k >= 0 and the Nyquist entry are read).
void slice_to_spectral(std::span<const double> values, std::span<Complex> coeffs);
void slice_to_physical(std::span<const Complex> coeffs, std::span<double> values);

}  // namespace detail

}  // namespace thetactl
