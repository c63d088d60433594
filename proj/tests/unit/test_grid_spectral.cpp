#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "thetactl/errors.hpp"
#include "thetactl/grid.hpp"
#include "thetactl/initial_data.hpp"
#include "thetactl/spectral.hpp"

using namespace thetactl;
using std::numbers::pi;

namespace {

GridSpec small_grid(int modes = 32, int n_eta = 11) {
  GridSpec g;
  g.n_modes = modes;
  g.n_eta = n_eta;
  g.n_steps = 100;
  return g;
}

SpectralField random_hermitian(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  SpectralField f(g);
  for (int j = 0; j < g.n_eta; ++j) {
    f.set_coeff(j, 0, n01(rng));
    for (int k = 1; k < g.n_modes / 2; ++k) {
      const Complex c(n01(rng), n01(rng));
      f.set_coeff(j, k, c);
      f.set_coeff(j, -k, std::conj(c));
    }
    f.set_coeff(j, -g.n_modes / 2, n01(rng));
  }
  return f;
}

}  // namespace

TEST_CASE("grid presets and node layout") {
  const GridSpec desk = desk_grid();
  CHECK(desk.n_modes == 128);
  CHECK(desk.n_eta == 51);
  CHECK(desk.dt() == doctest::Approx(0.005));
  CHECK(desk.eta(1) - desk.eta(0) == doctest::Approx(0.02));
  CHECK(desk.horizon == 6.0);

  const GridSpec paper = paper_grid();
  CHECK(paper.n_modes == 512);
  CHECK(paper.dt() == doctest::Approx(0.002));
  CHECK(paper.eta(1) - paper.eta(0) == doctest::Approx(0.002));

  // trapezoid weights sum to the span
  double s = 0.0;
  for (int j = 0; j < desk.n_eta; ++j) s += desk.eta_weight(j);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(desk.eta_weight(0) == doctest::Approx(0.01));

  GridSpec one = small_grid(16, 1);
  CHECK(one.eta(0) == doctest::Approx(0.5));
  CHECK(one.eta_weight(0) == doctest::Approx(1.0));
  one.eta_min = one.eta_max = 0.3;
  one.validate();
  CHECK(one.eta_weight(0) == 1.0);

  CHECK(desk.retained_wavenumber() == 42);
}

TEST_CASE("grid validation") {
  GridSpec g = small_grid();
  g.eta_min = 2.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = small_grid();
  g.n_modes = 31;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = small_grid();
  g.n_steps = 0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = small_grid();
  g.horizon = -1.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = small_grid();
  g.n_eta = 1;  // nonzero span with a single node is fine
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("transform of elementary fields") {
  const GridSpec g = small_grid();
  SpectralField c(g);
  for (int j = 0; j < g.n_eta; ++j) c.set_coeff(j, 0, 1.0 / (2 * pi));
  const PhysicalField pc = to_physical(c, g);
  for (int j = 0; j < g.n_eta; ++j)
    for (int m = 0; m < g.n_modes; ++m) CHECK(pc(j, m) == doctest::Approx(1.0 / (2 * pi)));

  SpectralField cs(g);
  for (int j = 0; j < g.n_eta; ++j) {
    cs.set_coeff(j, 1, 0.5);
    cs.set_coeff(j, -1, 0.5);
  }
  const PhysicalField pcs = to_physical(cs, g);
  for (int m = 0; m < g.n_modes; ++m)
    CHECK(pcs(3, m) == doctest::Approx(std::cos(g.theta(m))).epsilon(1e-14));

  // forward direction: sin 3 theta -> c_{+-3} = -+ i/2
  const PhysicalField s3 = PhysicalField::sample(g, [](double th, double) { return std::sin(3 * th); });
  const SpectralField cs3 = to_spectral(s3, g);
  CHECK(std::abs(cs3.coeff(0, 3) - Complex(0, -0.5)) < 1e-14);
  CHECK(std::abs(cs3.coeff(0, -3) - Complex(0, 0.5)) < 1e-14);
  CHECK(std::abs(cs3.coeff(0, 2)) < 1e-14);
}

TEST_CASE("paper density has modes 0 and +-2 only") {
  const GridSpec g = small_grid();
  const SpectralField f = to_spectral(paper_cossin2_density(g), g);
  for (int j = 0; j < g.n_eta; ++j) {
    const double eta = g.eta(j);
    CHECK(f.coeff(j, 0).real() == doctest::Approx(2 * eta));
    // 3 cos 2t - 2 sin 2t = (3/2 + i)e^{2it} + (3/2 - i)e^{-2it}
    CHECK(std::abs(f.coeff(j, 2) - Complex(1.5, 1.0) * eta) < 1e-13);
    CHECK(std::abs(f.coeff(j, -2) - Complex(1.5, -1.0) * eta) < 1e-13);
    for (int k : {1, 3, 4, -1, -3})
      CHECK(std::abs(f.coeff(j, k)) < 1e-13);
  }
}

TEST_CASE("round trip on random Hermitian coefficients") {
  for (int modes : {8, 32, 128}) {
    const GridSpec g = small_grid(modes, 5);
    const SpectralField f = random_hermitian(g, 11u + static_cast<unsigned>(modes));
    CHECK(f.hermitian_asymmetry() == 0.0);
    const SpectralField back = to_spectral(to_physical(f, g), g);
    double err = 0.0;
    for (std::size_t i = 0; i < f.data().size(); ++i)
      err = std::max(err, std::abs(back.data()[i] - f.data()[i]));
    CHECK(err <= 1e-12 * f.max_abs());
    CHECK(back.hermitian_asymmetry() == 0.0);
  }
}

TEST_CASE("to_physical rejects non-Hermitian input") {
  const GridSpec g = small_grid();
  SpectralField f(g);
  f.set_coeff(0, 1, Complex(1, 0));
  CHECK_THROWS_AS((void)to_physical(f, g), NumericError);
}

TEST_CASE("integrate") {
  GridSpec g = small_grid(32, 101);
  const SpectralField rho = to_spectral(paper_cossin2_density(g), g);
  // int (2 + ...) d theta = 4 pi eta, then int_0^1 eta = 1/2; trapezoid exact for linear eta
  CHECK(integrate(rho, [](double, double) { return 1.0; }, g) ==
        doctest::Approx(2 * pi).epsilon(1e-13));

  const SpectralField uni = to_spectral(uniform_density(g), g);
  CHECK(integrate(uni, [](double th, double) { return 1 + std::cos(th); }, g) ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK(integrate(rho, [](double, double) { return 0.0; }, g) == 0.0);

  // exactness for trigonometric weights: int cos^2(2 theta) * (1/2pi) = 1/2
  CHECK(integrate(uni, [](double th, double) { return std::cos(2 * th) * std::cos(2 * th); }, g) ==
        doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("integrate is linear in field and weight") {
  const GridSpec g = small_grid(16, 7);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralField f1 = random_hermitian(g, 100u + trial);
    const SpectralField f2 = random_hermitian(g, 200u + trial);
    const double a = u(rng), b = u(rng), p = u(rng), q = u(rng);
    const Weight w1 = [p](double th, double eta) { return std::cos(th + p) * eta; };
    const Weight w2 = [q](double th, double) { return std::exp(q * std::sin(th)); };
    SpectralField comb = f1;
    comb *= a;
    comb.add_scaled(f2, b);
    const double lhs = integrate(comb, w1, g);
    const double rhs = a * integrate(f1, w1, g) + b * integrate(f2, w1, g);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    const Weight wsum = [&](double th, double eta) { return a * w1(th, eta) + b * w2(th, eta); };
    CHECK(integrate(f1, wsum, g) ==
          doctest::Approx(a * integrate(f1, w1, g) + b * integrate(f1, w2, g)).epsilon(1e-11));
  }
}

TEST_CASE("slice and total mass") {
  const GridSpec g = small_grid(32, 11);
  const SpectralField uni = to_spectral(uniform_density(g), g);
  for (int j = 0; j < g.n_eta; ++j) CHECK(slice_mass(uni, j) == doctest::Approx(1.0));
  CHECK(slice_mass(SpectralField(g), 0) == 0.0);
  CHECK_THROWS_AS((void)slice_mass(uni, g.n_eta), ConfigError);

  SpectralField rho = to_spectral(paper_cossin2_density(g), g);
  normalize_mass(rho, g);
  CHECK(total_mass(rho, g) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate(rho, [](double, double) { return 1.0; }, g) ==
        doctest::Approx(1.0).epsilon(1e-12));
  for (int j = 0; j < g.n_eta; ++j)
    CHECK(slice_mass(rho, j) == doctest::Approx(4 * pi * g.eta(j) / (2 * pi)).epsilon(1e-13));

  SpectralField zero(g);
  CHECK_THROWS_AS(normalize_mass(zero, g), ConfigError);
}
