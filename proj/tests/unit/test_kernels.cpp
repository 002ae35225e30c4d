#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "swl/kernels.hpp"
#include "swl/quadrature.hpp"

using namespace swl;
using doctest::Approx;
constexpr double pi = std::numbers::pi;

TEST_CASE("covariance density reference values") {
  const double a[3] = {1, 0, 0};
  CHECK(covariance_density(KernelSpec::riesz(3, 1.0), a) == Approx(1.0));
  const double b[2] = {4, 0};
  CHECK(covariance_density(KernelSpec::riesz(2, 0.5), b) == Approx(0.5));
  const double c[2] = {1, 1};
  CHECK(covariance_density(KernelSpec::fractional({0.75, 0.75}), c) == Approx(0.140625));
  const double o[3] = {0, 0, 0};
  CHECK(std::isinf(covariance_density(KernelSpec::riesz(3, 1.0), o)));
  CHECK(std::isinf(covariance_density(KernelSpec::bessel(3, 2.0), o)));
  CHECK(covariance_density(KernelSpec::bessel(3, 5.0), o) == Approx(std::tgamma(1.0)));
}

TEST_CASE("Bessel w-integral agrees with the modified Bessel closed form") {
  for (auto [d, kappa] : std::vector<std::pair<int, double>>{{3, 3.0}, {2, 1.5}, {3, 2.0}, {1, 0.7}, {2, 4.0}}) {
    const auto k = KernelSpec::bessel(d, kappa);
    for (double r : {0.05, 0.3, 1.0, 2.5, 6.0}) {
      std::vector<double> x(d, 0.0);
      x[0] = r;
      CHECK(covariance_density(k, x) == Approx(covariance_radial(k, r)).epsilon(1e-8));
    }
  }
}

TEST_CASE("conventional Riesz and Bessel constants") {
  CHECK(riesz_constant(2, 1.0) * std::pow(2.0, -1.0) == Approx(0.5));
  CHECK(riesz_constant(3, 2.0) == Approx(std::sqrt(pi / 2)).epsilon(1e-12));
  CHECK(bessel_constant(3, 2.0) == Approx(std::pow(pi, -1.5)));
}

TEST_CASE("spectral density is the forward transform") {
  const double x2[2] = {2.0, 0.0};
  CHECK(spectral_density(KernelSpec::riesz(2, 1.0), x2) == Approx(pi));
  // Coulomb: F(1/|x|) = 4 pi / |xi|^2; F(1/|x|^2) = 2 pi^2 / |xi| in R^3.
  const double x3[3] = {0.0, 1.5, 0.0};
  CHECK(spectral_density(KernelSpec::riesz(3, 1.0), x3) == Approx(4 * pi / 2.25));
  CHECK(spectral_density(KernelSpec::riesz(3, 1.9999999), x3) == Approx(2 * pi * pi / 1.5).epsilon(1e-6));
  // Bessel at the origin equals the total mass of f.
  for (auto [d, kappa] : std::vector<std::pair<int, double>>{{3, 4.0}, {2, 3.0}, {1, 2.0}}) {
    const auto k = KernelSpec::bessel(d, kappa);
    const double area = d == 1 ? 2.0 : (d == 2 ? 2 * pi : 4 * pi);
    auto f = [&](double r) { return area * std::pow(r, d - 1.0) * covariance_radial(k, r); };
    const double mass = quad::half_line(f).value;
    std::vector<double> zero(d, 0.0);
    CHECK(spectral_density(k, zero) == Approx(mass).epsilon(1e-7));
    CHECK(spectral_density(k, zero) == Approx(std::pow(2 * pi, d) * bessel_constant(d, kappa)));
  }
  const double o[2] = {0.0, 0.0};
  CHECK_THROWS_AS(spectral_density(KernelSpec::riesz(2, 1.0), o), std::domain_error);
  const double ax[2] = {0.0, 1.0};
  CHECK_THROWS_AS(spectral_density(KernelSpec::fractional({0.8, 0.9}), ax), std::domain_error);
}

// int int phi(x) phi(y) f(x - y) = (2pi)^-d int |F phi|^2 g for Gaussians
// phi = exp(-|x|^2 / (2a^2)), via radial integrals on each side.
TEST_CASE("Fourier-pair consistency on Gaussian test functions") {
  for (const auto& k : {KernelSpec::riesz(3, 1.0), KernelSpec::riesz(2, 0.5), KernelSpec::riesz(2, 1.5),
                        KernelSpec::riesz(1, 0.4), KernelSpec::bessel(3, 3.0), KernelSpec::bessel(2, 1.0),
                        KernelSpec::bessel(3, 1.5)}) {
    const int d = k.dim;
    const double area = d == 1 ? 2.0 : (d == 2 ? 2 * pi : 4 * pi);
    for (double a : {0.5, 1.0, 2.0}) {
      auto real = [&](double r) {
        return area * std::pow(r, d - 1.0) * covariance_radial(k, r) * std::pow(pi * a * a, 0.5 * d) *
               std::exp(-r * r / (4 * a * a));
      };
      auto spec = [&](double r) {
        return spectral_radial_mass(k, r) * std::pow(2 * pi * a * a, d) * std::exp(-a * a * r * r);
      };
      const double lhs = quad::half_line(real).value;
      const double rhs = std::pow(2 * pi, -d) * quad::half_line(spec).value;
      CHECK(lhs == Approx(rhs).epsilon(1e-7));
    }
  }
  // Fractional: both sides factor over the axes.
  const auto k = KernelSpec::fractional({0.7, 0.85});
  for (double a : {0.5, 1.0, 2.0}) {
    double lhs = 1.0, rhs = 1.0;
    for (double h : k.hurst) {
      auto real = [&](double w) {
        return 2 * h * (2 * h - 1) * std::pow(w, 2 * h - 2) * std::sqrt(pi * a * a) * std::exp(-w * w / (4 * a * a));
      };
      auto spec = [&](double z) {
        return 2 * h * (2 * h - 1) * riesz_fourier_constant(1, 2 - 2 * h) * std::pow(z, 1 - 2 * h) * 2 * pi * a * a * std::exp(-a * a * z * z);
      };
      lhs *= quad::half_line(real).value;
      rhs *= quad::half_line(spec).value / (2 * pi);
    }
    const double xi[2] = {0.37, -1.2};
    const double direct = spectral_density(k, xi);
    const double manual = 0.7 * 0.4 * 0.85 * 0.7 * riesz_fourier_constant(1, 0.6) * std::pow(0.37, -0.4) *
                          riesz_fourier_constant(1, 0.3) * std::pow(1.2, -0.7);
    CHECK(direct == Approx(manual).epsilon(1e-12));
    CHECK(lhs == Approx(rhs).epsilon(1e-7));
  }
}

TEST_CASE("fractional radial mass matches the angular quadrature") {
  const auto k = KernelSpec::fractional({0.8, 0.9});
  auto ang = [&](double th) {
    const double xi[2] = {std::cos(th), std::sin(th)};
    return spectral_density(k, xi);
  };
  const double h = pi / 2;
  const double ring = quad::with_breaks(ang, 0.0, 2 * pi, {h, 2 * h, 3 * h}).value;
  CHECK(spectral_radial_mass(k, 1.0) == Approx(ring).epsilon(1e-7));
  // Homogeneity of degree d - 2 sum(H) plus d - 1 for the ring length.
  CHECK(spectral_radial_mass(k, 2.0) == Approx(ring * std::pow(2.0, 2 * 2 - 1 - 2 * 1.7)).epsilon(1e-7));
}

TEST_CASE("analytics reference values") {
  const auto a = compute_analytics(KernelSpec::riesz(3, 1.0));
  CHECK(a.c_mu == Approx(1.0).epsilon(1e-8));
  for (auto [d, beta] : std::vector<std::pair<int, double>>{{2, 0.5}, {2, 1.5}, {3, 0.7}, {1, 0.5}}) {
    const auto k = KernelSpec::riesz(d, beta);
    const double area = d == 1 ? 2.0 : (d == 2 ? 2 * pi : 4 * pi);
    const double closed = std::pow(2 * pi, -d) * area * riesz_fourier_constant(d, beta) * pi / (2 * std::sin(pi * beta / 2));
    CHECK(compute_analytics(k).c_mu == Approx(closed).epsilon(1e-7));
  }
  CHECK(compute_analytics(KernelSpec::riesz(2, 1.5)).nu.value == Approx(0.5));
  const auto f = KernelSpec::fractional({0.8, 0.9});
  CHECK(f.kappa_bar() == Approx(0.7));
  CHECK(compute_analytics(f).nu.value == Approx(1.4));
  CHECK(compute_analytics(KernelSpec::riesz(2, 1.0)).gamma_max == Approx(0.5));
  CHECK(compute_analytics(KernelSpec::bessel(3, 2.0)).gamma_max == Approx(0.5));
  CHECK(compute_analytics(KernelSpec::bessel(2, 5.0)).gamma_max == Approx(1.0));
  CHECK_THROWS_AS(compute_analytics(KernelSpec::riesz(2, 1.0), 0.6), std::domain_error);
  // C_mu^(gamma) >= C_mu since |xi|^(2-2gamma) <= |xi|^2 for |xi| >= 1 dominates.
  const auto g = compute_analytics(KernelSpec::riesz(3, 1.0), 0.25);
  CHECK(g.c_mu_gamma > g.c_mu);
}

TEST_CASE("invalid kernel parameters are rejected") {
  CHECK_THROWS(KernelSpec::riesz(3, 2.0));
  CHECK_THROWS(KernelSpec::riesz(1, 1.0));
  CHECK_THROWS(KernelSpec::bessel(3, 1.0));
  CHECK_THROWS(KernelSpec::fractional({0.5, 0.9}));
  CHECK_THROWS(KernelSpec::fractional({0.55, 0.55, 0.55}));
}

TEST_CASE("divergence probes bracket gamma_max and flag beta >= 2") {
  for (const auto& k : {KernelSpec::riesz(3, 1.0), KernelSpec::riesz(2, 0.5), KernelSpec::bessel(3, 2.0),
                        KernelSpec::fractional({0.8, 0.9})}) {
    const double gm = compute_analytics(k).gamma_max;
    CHECK_FALSE(probe_c_mu(k, gm - 0.1).diverges);
    CHECK(probe_c_mu(k, gm + 0.1).diverges);
  }
  const auto bad = KernelSpec::unchecked(KernelFamily::Riesz, 3, 2.0, 0, {});
  CHECK(probe_c_mu(bad, 0.0).diverges);
  const auto bad2 = KernelSpec::unchecked(KernelFamily::Riesz, 3, 2.5, 0, {});
  CHECK(probe_c_mu(bad2, 0.0).diverges);
}

TEST_CASE("spectral energy: closed forms against direct quadrature") {
  CHECK(spectral_energy(KernelSpec::riesz(3, 1.0), 0.7) == Approx(0.7).epsilon(1e-10));
  CHECK(spectral_energy(KernelSpec::white_noise(), 0.7) == Approx(0.35));
  for (const auto& k : {KernelSpec::riesz(2, 1.5), KernelSpec::fractional({0.8, 0.9}), KernelSpec::riesz(3, 0.5)}) {
    for (double t : {0.3, 1.0}) {
      auto f = [&](double r) {
        const double s = std::sin(t * r) / r;
        return spectral_radial_mass(k, r) * s * s;
      };
      // Direct: long head plus power tail average 1/2.
      const double head = 2000 * pi;
      std::vector<double> br;
      for (double b = pi / t; b < head; b += 50 * pi / t) br.push_back(b);
      double v = quad::with_breaks(f, 0.0, head, br, {1e-15, 1e-10, 20000}).value;
      v += quad::upper_tail([&](double r) { return 0.5 * spectral_radial_mass(k, r) / (r * r); }, head).value;
      CHECK(spectral_energy(k, t) == Approx(v * std::pow(2 * pi, -k.dim)).epsilon(2e-4));
    }
  }
  // Bessel numeric route against a long direct head.
  const auto b = KernelSpec::bessel(3, 2.0);
  auto f = [&](double r) {
    const double s = std::sin(0.5 * r) / r;
    return spectral_radial_mass(b, r) * s * s;
  };
  const double head = 4000 * pi;
  std::vector<double> br;
  for (double x = 2 * pi; x < head; x += 100 * pi) br.push_back(x);
  double v = quad::with_breaks(f, 0.0, head, br, {1e-15, 1e-10, 20000}).value;
  v += quad::upper_tail([&](double r) { return 0.5 * spectral_radial_mass(b, r) / (r * r); }, head).value;
  CHECK(spectral_energy(b, 0.5) == Approx(v / std::pow(2 * pi, 3)).epsilon(2e-4));
}

TEST_CASE("zero-mode cell mass matches direct cube integration") {
  const double L = 8.0, h = pi / L;
  for (double beta : {0.5, 1.0, 1.5}) {
    const auto k = KernelSpec::riesz(2, beta);
    auto outer = [&](double x) {
      auto inner = [&](double y) { return std::pow(x * x + y * y, 0.5 * (beta - 2)); };
      return quad::finite(inner, 0.0, h, {1e-15, 1e-11, 2000}).value;
    };
    const double direct = 4 * riesz_fourier_constant(2, beta) * quad::finite(outer, 0.0, h, {1e-15, 1e-10, 2000}).value;
    const int zero[2] = {0, 0};
    CHECK(spectral_cell_mass(k, zero, L) == Approx(direct).epsilon(1e-7));
  }
  const auto k3 = KernelSpec::riesz(3, 1.0);
  const int zero3[3] = {0, 0, 0};
  auto ox = [&](double x) {
    auto oy = [&](double y) {
      auto oz = [&](double z) { return 1.0 / (x * x + y * y + z * z); };
      return quad::finite(oz, 0.0, h, {1e-15, 1e-9, 2000}).value;
    };
    return quad::finite(oy, 0.0, h, {1e-15, 1e-8, 2000}).value;
  };
  const double cube = 8 * riesz_fourier_constant(3, 1.0) * quad::finite(ox, 0.0, h, {1e-15, 1e-7, 2000}).value;
  CHECK(spectral_cell_mass(k3, zero3, L) == Approx(cube).epsilon(1e-6));
  const int off[2] = {3, -1};
  const double xi[2] = {2 * pi * 3 / L, -2 * pi / L};
  CHECK(spectral_cell_mass(KernelSpec::riesz(2, 1.0), off, L) ==
        Approx(spectral_density(KernelSpec::riesz(2, 1.0), xi) * std::pow(2 * pi / L, 2)));
}

TEST_CASE("radial profiles are monotone") {
  for (const auto& k : {KernelSpec::riesz(3, 1.0), KernelSpec::bessel(3, 3.0), KernelSpec::bessel(2, 1.0)}) {
    double prev_f = INFINITY, prev_g = INFINITY;
    for (int i = 1; i < 200; ++i) {
      const double r = 0.05 * i;
      const double f = covariance_radial(k, r), g = spectral_radial(k, r);
      CHECK(f <= prev_f);
      CHECK(g <= prev_g);
      prev_f = f;
      prev_g = g;
    }
  }
}
