#include "thetactl/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "thetactl/errors.hpp"

namespace thetactl {

namespace {

// FFTW's planner is not thread-safe; execution on plan-owned buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class SliceTransform {
 public:
  explicit SliceTransform(int n) : n_(n) {
    std::lock_guard lock(planner_mutex());
    real_ = fftw_alloc_real(static_cast<std::size_t>(n));
    half_ = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    forward_ = fftw_plan_dft_r2c_1d(n, real_, half_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(n, half_, real_, FFTW_ESTIMATE);
  }
  ~SliceTransform() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(inverse_);
    fftw_destroy_plan(forward_);
    fftw_free(half_);
    fftw_free(real_);
  }
  SliceTransform(const SliceTransform&) = delete;
  SliceTransform& operator=(const SliceTransform&) = delete;

  void forward(std::span<const double> values, std::span<Complex> coeffs) {
    std::copy(values.begin(), values.end(), real_);
    fftw_execute(forward_);
    const int half = n_ / 2;
    const double scale = 1.0 / n_;
    for (int k = 0; k < half; ++k) {
      coeffs[static_cast<std::size_t>(k)] = Complex(half_[k][0], half_[k][1]) * scale;
    }
    coeffs[static_cast<std::size_t>(half)] = Complex(half_[half][0] * scale, 0.0);
    for (int k = 1; k < half; ++k) {
      coeffs[static_cast<std::size_t>(n_ - k)] = std::conj(coeffs[static_cast<std::size_t>(k)]);
    }
  }

  void inverse(std::span<const Complex> coeffs, std::span<double> values) {
    const int half = n_ / 2;
    for (int k = 0; k < half; ++k) {
      half_[k][0] = coeffs[static_cast<std::size_t>(k)].real();
      half_[k][1] = coeffs[static_cast<std::size_t>(k)].imag();
    }
    half_[0][1] = 0.0;
    half_[half][0] = coeffs[static_cast<std::size_t>(half)].real();
    half_[half][1] = 0.0;
    fftw_execute(inverse_);
    std::copy(real_, real_ + n_, values.begin());
  }

 private:
  int n_;
  double* real_ = nullptr;
  fftw_complex* half_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

SliceTransform& transform_for(int n) {
  thread_local std::map<int, std::unique_ptr<SliceTransform>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<SliceTransform>(n);
  return *slot;
}

void require_shape(int n_eta, int n_modes, const GridSpec& grid, const char* what) {
  if (n_eta != grid.n_eta || n_modes != grid.n_modes) {
    throw ConfigError(std::string(what) + ": field shape (" + std::to_string(n_eta) + ", " +
                      std::to_string(n_modes) + ") does not match grid (" +
                      std::to_string(grid.n_eta) + ", " + std::to_string(grid.n_modes) + ")");
  }
}

}  // namespace

namespace detail {

void slice_to_spectral(std::span<const double> values, std::span<Complex> coeffs) {
  transform_for(static_cast<int>(values.size())).forward(values, coeffs);
}

void slice_to_physical(std::span<const Complex> coeffs, std::span<double> values) {
  transform_for(static_cast<int>(values.size())).inverse(coeffs, values);
}

}  // namespace detail

SpectralField::SpectralField(int n_eta, int n_modes)
    : n_eta_(n_eta),
      n_modes_(n_modes),
      coeffs_(static_cast<std::size_t>(n_eta) * static_cast<std::size_t>(n_modes)) {}

std::span<Complex> SpectralField::slice(int j) {
  return std::span<Complex>(coeffs_).subspan(static_cast<std::size_t>(j) * n_modes_,
                                             static_cast<std::size_t>(n_modes_));
}

std::span<const Complex> SpectralField::slice(int j) const {
  return std::span<const Complex>(coeffs_).subspan(static_cast<std::size_t>(j) * n_modes_,
                                                   static_cast<std::size_t>(n_modes_));
}

Complex SpectralField::coeff(int j, int k) const {
  return slice(j)[static_cast<std::size_t>(storage_index(k, n_modes_))];
}

void SpectralField::set_coeff(int j, int k, Complex value) {
  slice(j)[static_cast<std::size_t>(storage_index(k, n_modes_))] = value;
}

double SpectralField::hermitian_asymmetry() const {
  double worst = 0.0;
  const int half = n_modes_ / 2;
  for (int j = 0; j < n_eta_; ++j) {
    auto c = slice(j);
    worst = std::max(worst, std::abs(c[0].imag()));
    worst = std::max(worst, std::abs(c[static_cast<std::size_t>(half)].imag()));
    for (int k = 1; k < half; ++k) {
      const Complex diff = c[static_cast<std::size_t>(n_modes_ - k)] -
                           std::conj(c[static_cast<std::size_t>(k)]);
      worst = std::max(worst, std::abs(diff));
    }
  }
  return worst;
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double factor) {
  for (auto& c : coeffs_) c *= factor;
  return *this;
}

void SpectralField::add_scaled(const SpectralField& other, double factor) {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += factor * other.coeffs_[i];
}

PhysicalField::PhysicalField(int n_eta, int n_modes, double fill)
    : n_eta_(n_eta),
      n_modes_(n_modes),
      values_(static_cast<std::size_t>(n_eta) * static_cast<std::size_t>(n_modes), fill) {}

std::span<double> PhysicalField::slice(int j) {
  return std::span<double>(values_).subspan(index(j, 0), static_cast<std::size_t>(n_modes_));
}

std::span<const double> PhysicalField::slice(int j) const {
  return std::span<const double>(values_).subspan(index(j, 0),
                                                  static_cast<std::size_t>(n_modes_));
}

PhysicalField PhysicalField::sample(const GridSpec& grid,
                                    const std::function<double(double, double)>& f) {
  PhysicalField out(grid);
  for (int j = 0; j < grid.n_eta; ++j) {
    const double eta = grid.eta(j);
    for (int m = 0; m < grid.n_modes; ++m) out(j, m) = f(grid.theta(m), eta);
  }
  return out;
}

SpectralField to_spectral(const PhysicalField& f, const GridSpec& grid) {
  require_shape(f.n_eta(), f.n_modes(), grid, "to_spectral");
  SpectralField out(grid);
  for (int j = 0; j < grid.n_eta; ++j) detail::slice_to_spectral(f.slice(j), out.slice(j));
  return out;
}

PhysicalField to_physical(const SpectralField& f, const GridSpec& grid) {
  require_shape(f.n_eta(), f.n_modes(), grid, "to_physical");
  const double tolerance = 1e-12 * std::max(1.0, f.max_abs());
  if (const double asym = f.hermitian_asymmetry(); !(asym <= tolerance)) {
    throw NumericError("to_physical: coefficients are not Hermitian (asymmetry " +
                       std::to_string(asym) + ")");
  }
  PhysicalField out(grid);
  for (int j = 0; j < grid.n_eta; ++j) detail::slice_to_physical(f.slice(j), out.slice(j));
  return out;
}

double integrate(const PhysicalField& f, const Weight& weight, const GridSpec& grid) {
  require_shape(f.n_eta(), f.n_modes(), grid, "integrate");
  const double dtheta = kTwoPi / grid.n_modes;
  double total = 0.0;
  for (int j = 0; j < grid.n_eta; ++j) {
    const double eta = grid.eta(j);
    double slice_sum = 0.0;
    for (int m = 0; m < grid.n_modes; ++m) slice_sum += f(j, m) * weight(grid.theta(m), eta);
    total += grid.eta_weight(j) * dtheta * slice_sum;
  }
  if (!std::isfinite(total)) throw NumericError("integrate: non-finite result");
  return total;
}

double integrate(const SpectralField& f, const Weight& weight, const GridSpec& grid) {
  return integrate(to_physical(f, grid), weight, grid);
}

double slice_mass(const SpectralField& f, int j) {
  if (j < 0 || j >= f.n_eta()) {
    throw ConfigError("slice_mass: eta index " + std::to_string(j) + " out of range");
  }
  return kTwoPi * f.slice(j)[0].real();
}

double total_mass(const SpectralField& f, const GridSpec& grid) {
  require_shape(f.n_eta(), f.n_modes(), grid, "total_mass");
  double total = 0.0;
  for (int j = 0; j < grid.n_eta; ++j) total += grid.eta_weight(j) * slice_mass(f, j);
  return total;
}

void normalize_mass(SpectralField& f, const GridSpec& grid) {
  const double mass = total_mass(f, grid);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw ConfigError("normalize: total mass must be positive, got " + std::to_string(mass));
  }
  f *= 1.0 / mass;
}

}  // namespace thetactl
