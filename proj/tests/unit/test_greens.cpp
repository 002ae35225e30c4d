#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "swl/greens.hpp"
#include "swl/quadrature.hpp"

using namespace swl;
using doctest::Approx;
constexpr double pi = std::numbers::pi;

TEST_CASE("density and multiplier reference values") {
  const double a[1] = {0.2}, b[1] = {0.7};
  CHECK(greens::density(1, 0.5, a) == 0.5);
  CHECK(greens::density(1, 0.5, b) == 0.0);
  const double o[2] = {0, 0};
  CHECK(greens::density(2, 1.0, o) == Approx(1 / (2 * pi)));
  const double o3[3] = {0, 0, 0};
  CHECK_THROWS_AS(greens::density(3, 1.0, o3), std::invalid_argument);
  CHECK(greens::fourier(2.0, 0.0) == 2.0);
  CHECK(std::abs(greens::fourier(1.0, pi)) < 1e-15);
  CHECK(greens::fourier(2.0, 1.0) == Approx(std::sin(2.0)));
}

TEST_CASE("integration against test functions") {
  const greens::TestFn one = [](std::span<const double>) { return 1.0; };
  const greens::TestFn r2 = [](std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
  };
  for (int d = 1; d <= 3; ++d) CHECK(greens::integrate(d, 1.7, one) == Approx(1.7).epsilon(1e-12));
  const greens::TestFn lin = [](std::span<const double> x) { return x[0]; };
  CHECK(std::abs(greens::integrate(1, 1.3, lin)) < 1e-14);
  CHECK(greens::integrate(3, 1.0, r2) == Approx(1.0).epsilon(1e-12));
  // d=1: (1/2) int_{-t}^{t} x^2 = t^3/3; d=2 via the radial density directly.
  CHECK(greens::integrate(1, 2.0, r2) == Approx(8.0 / 3));
  auto radial = [](double r) { return r * r * r / std::sqrt(4.0 - r * r); };
  CHECK(greens::integrate(2, 2.0, r2) == Approx(quad::finite(radial, 0.0, 2.0).value).epsilon(1e-10));
  // Convolution with a centre: (G(t) * cos)(x) = cos x sin t.
  const greens::TestFn c = [](std::span<const double> x) { return std::cos(x[0]); };
  const double x0[1] = {0.4};
  CHECK(greens::integrate(1, 0.9, c, x0) == Approx(std::cos(0.4) * std::sin(0.9)).epsilon(1e-12));
  // d=3 plane wave: t * sinc(t k) * cos(k . x).
  const greens::TestFn pw = [](std::span<const double> x) { return std::cos(2.0 * x[2]); };
  CHECK(greens::integrate(3, 0.8, pw) == Approx(std::sin(1.6) / 2.0).epsilon(1e-12));
  // d=2 plane wave: sin(k t)/k.
  const greens::TestFn pw2 = [](std::span<const double> x) { return std::cos(3.0 * x[0]); };
  CHECK(greens::integrate(2, 0.8, pw2) == Approx(std::sin(2.4) / 3.0).epsilon(1e-10));
}

TEST_CASE("pairing closed forms") {
  const auto r31 = KernelSpec::riesz(3, 1.0);
  CHECK(greens::pairing_real_space(0.0, 1.0, r31) == 0.0);
  CHECK(greens::pairing_spectral(1.0, 0.0, r31) == 0.0);
  // Riesz beta=1 in R^3: pairing = min(t, s).
  for (auto [t, s] : std::vector<std::pair<double, double>>{{1, 1}, {1, 0.5}, {0.3, 0.8}}) {
    CHECK(greens::pairing_real_space(t, s, r31) == Approx(std::min(t, s)).epsilon(1e-10));
    CHECK(greens::pairing_spectral(t, s, r31) == Approx(std::min(t, s)).epsilon(1e-7));
  }
  // White noise: overlap of the two intervals over 4.
  const auto w = KernelSpec::white_noise();
  CHECK(greens::pairing_real_space(1.0, 0.5, w) == Approx(0.25));
  CHECK(greens::pairing_spectral(1.0, 0.5, w) == Approx(0.25).epsilon(1e-7));
  const double z[1] = {0.8};
  CHECK(greens::pairing_real_space(1.0, 0.5, w, z) == Approx(0.25 * 0.7));
  CHECK(greens::pairing_spectral(1.0, 0.5, w, z) == Approx(0.25 * 0.7).epsilon(1e-6));
}

TEST_CASE("real-space and spectral routes agree") {
  for (const auto& k : {KernelSpec::riesz(1, 0.5), KernelSpec::bessel(1, 1.0), KernelSpec::riesz(3, 0.5),
                        KernelSpec::bessel(3, 2.0), KernelSpec::riesz(2, 1.0), KernelSpec::bessel(2, 2.5)}) {
    const auto p = greens::pairing(1.0, 0.5, k);
    INFO(to_string(k.family), " ", k.params_string(), " real=", p.real_space, " spec=", p.spectral);
    CHECK(p.discrepancy < 1e-4);
  }
}

TEST_CASE("shifted pairing routes agree") {
  const double z1[1] = {0.3};
  const double z3[3] = {0.1, 0.2, -0.4};
  const double z2[2] = {0.25, 0.1};
  for (auto [k, z] : std::vector<std::pair<KernelSpec, std::span<const double>>>{
           {KernelSpec::riesz(1, 0.5), z1}, {KernelSpec::riesz(3, 1.0), z3}, {KernelSpec::bessel(3, 3.0), z3},
           {KernelSpec::riesz(2, 1.0), z2}}) {
    const auto p = greens::pairing(0.9, 0.6, k, z);
    INFO(to_string(k.family), " ", k.params_string(), " real=", p.real_space, " spec=", p.spectral);
    CHECK(p.discrepancy < 1e-3);
  }
}

TEST_CASE("fractional kernel in d=2 through the anisotropic real-space route") {
  const auto k = KernelSpec::fractional({0.8, 0.9});
  const auto p = greens::pairing(1.0, 1.0, k);
  INFO("real=", p.real_space, " spec=", p.spectral);
  CHECK(p.discrepancy < 1e-3);
  CHECK(greens::pairing_spectral(0.5, 0.5, k) == Approx(spectral_energy(k, 0.5)).epsilon(1e-6));
}

TEST_CASE("invariant battery passes") {
  for (const auto& c : greens::invariant_battery(true)) {
    INFO(c.name, " value=", c.value, " expected=", c.expected);
    CHECK(c.pass);
  }
}
