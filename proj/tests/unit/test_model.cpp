#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "swl/model.hpp"

using namespace swl;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

CoefficientPair superlinear(double theta2, double delta, double sigma2, double a) {
  CoefficientSpec s;
  s.family = CoefficientFamily::Superlinear;
  s.theta1 = 0.0;
  s.theta2 = theta2;
  s.delta = delta;
  s.sigma1 = 0.0;
  s.sigma2 = sigma2;
  s.a = a;
  return make_coefficients(s);
}
}  // namespace

TEST_CASE("truncate clamps outside the window") {
  auto sq = truncate([](double x) { return x * x; }, 2.0);
  CHECK(sq(3.0) == 4.0);
  CHECK(sq(1.5) == 2.25);
  CHECK(sq(-3.0) == 4.0);
  CHECK_THROWS(truncate([](double x) { return x; }, 0.0));
}

TEST_CASE("truncate nests and is Lipschitz with the window constant") {
  auto cube = [](double x) { return x * x * x; };
  auto inner = truncate(cube, 1.5);
  auto outer = truncate(truncate(cube, 3.0), 1.5);
  for (double x = -5; x <= 5; x += 0.13) CHECK(inner(x) == outer(x));
  const double lip = 3.0 * 1.5 * 1.5;
  for (double x = -4; x < 4; x += 0.01) CHECK(std::abs(inner(x + 0.01) - inner(x)) <= lip * 0.01 * (1 + 1e-12));
}

TEST_CASE("ln_plus floors at one") {
  CHECK(ln_plus(0.0) == 1.0);
  CHECK(ln_plus(1.0) == 1.0);
  CHECK(ln_plus(std::exp(3.0)) == Approx(3.0));
}

TEST_CASE("superlinear coefficients are sign preserving with log factor") {
  auto c = superlinear(2.0, 1.0, 0.5, 0.5);
  CHECK(c.drift(0.0) == 0.0);
  CHECK(c.drift(1.0) == Approx(2.0));
  CHECK(c.drift(-std::exp(2.0)) == Approx(-2.0 * std::exp(2.0) * 2.0));
  CHECK(c.diffusion(std::exp(4.0)) == Approx(0.5 * std::exp(4.0) * 2.0));
  CHECK_FALSE(c.lip_drift.has_value());
}

TEST_CASE("linear coefficients carry Lipschitz metadata") {
  auto c = make_linear(0.5, -2.0, 1.0, 0.3);
  CHECK(c.drift(1.0) == Approx(-1.5));
  CHECK(c.diffusion(2.0) == Approx(1.6));
  CHECK(*c.lip_drift == 2.0);
  CHECK(*c.lip_diffusion == Approx(0.3));
  CHECK(c.theta1 == 0.5);
  CHECK(c.sigma1 == 1.0);
}

TEST_CASE("tabulated coefficients interpolate") {
  const auto path = std::filesystem::temp_directory_path() / "swl_coeff_table.csv";
  {
    std::ofstream out(path);
    out << "z,b,sigma\n-1,-2,0.5\n0,0,0\n1,3,0.5\n";
  }
  CoefficientSpec s;
  s.family = CoefficientFamily::Tabulated;
  s.table_path = path.string();
  auto c = make_coefficients(s);
  CHECK(c.drift(0.5) == Approx(1.5));
  CHECK(c.drift(-0.25) == Approx(-0.5));
  CHECK(c.drift(7.0) == 3.0);
  CHECK(c.diffusion(-0.5) == Approx(0.25));
  CHECK(*c.lip_drift == Approx(3.0));
  std::filesystem::remove(path);
  s.table_path = "/nonexistent/table.csv";
  CHECK_THROWS(make_coefficients(s));
}

TEST_CASE("truncated constants") {
  auto c = superlinear(1.0, 1.0, 0.1, 0.25);
  const auto k = truncated_constants(c, 2.0);
  CHECK(k.lip_drift == Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(k.lip_drift == Approx(1.38629).epsilon(1e-5));
  CHECK(k.bound_drift == 0.0);
  CHECK(truncated_constants(c, 50.0).bound_drift == 0.0);
  CHECK_THROWS(truncated_constants(c, 1.5));

  auto r = superlinear(1.0, 0.4, 1.0, 0.1);
  const auto q = truncated_constants(r, std::exp(5.0) / 2.0);
  CHECK(q.lip_drift / (q.lip_diffusion * q.lip_diffusion) == Approx(std::pow(5.0, 0.2)).epsilon(1e-12));
}

TEST_CASE("domination check: d=1 clauses and intervals") {
  DominationInput in;
  in.dim = 1;
  in.gamma = 0.5;
  in.levels = {2.0};
  auto strict = check_domination(superlinear(1.0, 1.0, 0.1, 0.25), in);
  CHECK(strict.satisfied);
  CHECK(strict.clause == 1);
  CHECK(strict.theorem_covers);
  REQUIRE(strict.intervals.size() == 1);
  CHECK(strict.intervals[0].lo == 2.0);
  CHECK(strict.intervals[0].hi == Approx(25.0 * std::sqrt(std::log(4.0))).epsilon(1e-12));
  CHECK(strict.intervals[0].hi == Approx(29.44).epsilon(1e-3));

  // delta = 2a with theta2 exactly at the threshold 16 sigma2^2 is a violation.
  auto boundary = check_domination(superlinear(16.0 * 0.04, 0.5, 0.2, 0.25), in);
  CHECK_FALSE(boundary.satisfied);
  auto above = check_domination(superlinear(16.0 * 0.04 * 1.01, 0.5, 0.2, 0.25), in);
  CHECK(above.satisfied);
  CHECK(above.clause == 2);

  auto weak = check_domination(superlinear(1.0, 0.2, 0.1, 0.25), in);
  CHECK_FALSE(weak.satisfied);

  auto steep = check_domination(superlinear(1.0, 2.5, 0.1, 0.25), in);
  CHECK(steep.satisfied);
  CHECK_FALSE(steep.theorem_covers);
  CHECK(steep.theorem_message.find("NOT covered") != std::string::npos);
}

TEST_CASE("domination check: d>=2") {
  DominationInput in;
  in.dim = 3;
  in.c_mu = 1.0;
  in.nu1 = 1.0;
  in.nu2 = 1.0;
  in.levels = {2.0, 100.0};
  auto ok = check_domination(superlinear(1.0, 0.4, 0.1, 0.05), in);
  CHECK(ok.satisfied);
  CHECK(ok.clause == 1);
  CHECK(ok.theorem_covers);
  const auto k = truncated_constants(superlinear(1.0, 0.4, 0.1, 0.05), 100.0);
  CHECK(ok.intervals[1].hi == Approx(std::sqrt(k.lip_drift) / (96.0 * k.lip_diffusion * k.lip_diffusion)));

  auto uncovered = check_domination(superlinear(1.0, 1.0, 0.1, 0.2), in);
  CHECK(uncovered.satisfied);
  CHECK_FALSE(uncovered.theorem_covers);

  // delta = 4a: threshold 2^12 * 9 * c_mu^2 sigma2^4 (1/nu1 + d/nu2)^2.
  const double thr = 4096.0 * 9.0 * std::pow(0.1, 4) * 16.0;
  CHECK_FALSE(check_domination(superlinear(thr, 0.4, 0.1, 0.1), in).satisfied);
  CHECK(check_domination(superlinear(thr * 1.001, 0.4, 0.1, 0.1), in).clause == 2);
}

TEST_CASE("initial term d=1 examples") {
  InitialData d;
  d.u0 = [](std::span<const double>) { return 0.0; };
  d.v0 = [](std::span<const double>) { return 1.0; };
  for (double t : {0.3, 1.0, 2.5}) {
    const double x[1] = {0.7};
    CHECK(initial_term(d, 1, t, x) == Approx(t).epsilon(1e-12));
  }
  d.u0 = [](std::span<const double> x) { return std::cos(x[0]); };
  d.v0 = [](std::span<const double>) { return 0.0; };
  for (double t : {0.3, 1.0, 2.5}) {
    const double x[1] = {0.4};
    CHECK(initial_term(d, 1, t, x) == Approx(std::cos(0.4) * std::cos(t)).epsilon(1e-13));
  }
}

TEST_CASE("initial term d=2 and d=3 closed forms") {
  InitialData d;
  d.u0 = [](std::span<const double>) { return 0.0; };
  d.v0 = [](std::span<const double>) { return 1.0; };
  d.grad_u0 = [](std::span<const double>, std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); };
  d.lap_u0 = [](std::span<const double>) { return 0.0; };
  const double x3[3] = {0.2, -0.1, 0.5};
  CHECK(initial_term(d, 3, 1.3, x3) == Approx(1.3).epsilon(1e-10));
  const double x2[2] = {0.2, -0.1};
  CHECK(initial_term(d, 2, 1.3, x2) == Approx(1.3).epsilon(1e-8));

  // u0 = |x|^2 is a free wave with u = |x|^2 + d t^2.
  InitialData q;
  q.u0 = [](std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
  };
  q.v0 = [](std::span<const double>) { return 0.0; };
  q.grad_u0 = [](std::span<const double> x, std::span<double> g) {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2 * x[i];
  };
  q.lap_u0 = [](std::span<const double> x) { return 2.0 * static_cast<double>(x.size()); };
  const double t = 0.8;
  CHECK(initial_term(q, 3, t, x3) == Approx(0.3 + 3 * t * t).epsilon(1e-10));
  CHECK(initial_term(q, 2, t, x2) == Approx(0.05 + 2 * t * t).epsilon(1e-6));

  InitialData missing;
  missing.u0 = q.u0;
  missing.v0 = q.v0;
  CHECK_THROWS(initial_term(missing, 2, t, x2));
  CHECK_THROWS(initial_term(missing, 3, t, x3));
}

TEST_CASE("initial term satisfies the free wave equation") {
  // Plane wave u0 = cos(k.x) in d=2 and a bump in d=3; central differences.
  InitialSpec spec;
  spec.family = InitialFamily::Bump;
  spec.amplitude = 1.0;
  spec.velocity = 0.5;
  spec.rho = 2.0;
  for (int dim : {1, 2, 3}) {
    const auto data = make_initial_data(spec, dim, 8.0, 256);
    const double h = 0.02, t = 0.6;
    std::vector<double> x(dim, 0.0);
    x[0] = 0.3;
    auto I = [&](double tt, const std::vector<double>& p) { return initial_term(data, dim, tt, p); };
    const double utt = (I(t + h, x) - 2 * I(t, x) + I(t - h, x)) / (h * h);
    double lap = 0.0;
    for (int i = 0; i < dim; ++i) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      lap += (I(t, xp) - 2 * I(t, x) + I(t, xm)) / (h * h);
    }
    INFO("dim=" << dim << " utt=" << utt << " lap=" << lap);
    CHECK(std::abs(utt - lap) < 1e-3 * std::max(1.0, std::abs(lap)));
  }
}

TEST_CASE("initial term bound in d=1") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double a1 = U(gen), a2 = U(gen), b1 = U(gen), k1 = 3 * U(gen), k2 = 3 * U(gen);
    InitialData d;
    d.u0 = [=](std::span<const double> x) { return a1 * std::sin(k1 * x[0]) + a2 * std::cos(k2 * x[0]); };
    d.v0 = [=](std::span<const double> x) { return b1 * std::cos(k2 * x[0]); };
    const double sup_u = std::abs(a1) + std::abs(a2), sup_v = std::abs(b1);
    const double t = 0.1 + std::abs(U(gen)) * 2;
    for (double x0 = -3; x0 <= 3; x0 += 0.25) {
      const double x[1] = {x0};
      CHECK(std::abs(initial_term(d, 1, t, x)) <= t * sup_v + sup_u + 1e-12);
    }
  }
}

TEST_CASE("built-in initial data") {
  InitialSpec spec;
  spec.family = InitialFamily::Bump;
  spec.rho = 1.5;
  spec.amplitude = 2.0;
  const auto b = make_initial_data(spec, 3, 8.0, 64);
  const double out[3] = {1.0, 1.0, 0.5};
  const double origin[3] = {0, 0, 0};
  CHECK(b.u0(out) == 0.0);
  CHECK(b.u0(origin) == 2.0);
  // Laplacian against finite differences.
  const double p[3] = {0.3, -0.2, 0.4};
  const double h = 1e-4;
  double fd = 0;
  for (int i = 0; i < 3; ++i) {
    double pp[3] = {p[0], p[1], p[2]}, pm[3] = {p[0], p[1], p[2]};
    pp[i] += h;
    pm[i] -= h;
    fd += (b.u0(pp) - 2 * b.u0(p) + b.u0(pm)) / (h * h);
  }
  CHECK(b.lap_u0(p) == Approx(fd).epsilon(1e-5));

  spec.family = InitialFamily::Trigonometric;
  spec.mode = 2;
  spec.amplitude = 1.0;
  const auto tr = make_initial_data(spec, 1, 4.0, 64);
  const double x[1] = {1.0};
  CHECK(tr.u0(x) == Approx(std::cos(kPi)));

  spec.family = InitialFamily::Weierstrass;
  spec.holder = 0.4;
  spec.mode = 1;
  const auto w = make_initial_data(spec, 1, 4.0, 1024);
  CHECK(w.gamma1 == 0.4);
  CHECK_FALSE(w.grad_u0);
  CHECK(std::abs(w.u0(x)) <= w.sup_u0);
  CHECK_THROWS(initial_family_from_string("gaussian"));
}
