#include <cmath>
#include <vector>

#include "doctest.h"
#include "swl/rng.hpp"
#include "swl/stats.hpp"

using namespace swl;
using namespace swl::stats;
using doctest::Approx;

namespace {
MomentAccumulator gaussian_ensemble(std::size_t paths, std::uint64_t seed, double scale = 1.0) {
  MomentAccumulator acc(2.0, {0.5, 1.0}, 3);
  for (std::uint32_t p = 0; p < paths; ++p) {
    std::vector<double> row(6);
    for (std::size_t i = 0; i < 6; ++i) {
      const double z = scale * (1.0 + static_cast<double>(i % 3)) * normal_at({seed, p, 0, Stream::Synthetic}, i);
      row[i] = z * z;
    }
    acc.add(p, row);
  }
  return acc;
}
}  // namespace

TEST_CASE("zero ensemble gives zero estimates") {
  MomentAccumulator acc(2.0, {0.5, 1.0}, 4);
  for (std::uint32_t p = 0; p < 40; ++p) acc.add(p, std::vector<double>(8, 0.0));
  const auto r = estimate_moments(acc, 0.0);
  for (const auto& e : r.sup_moment) {
    CHECK(e.value == 0.0);
    CHECK(e.ci_hi == 0.0);
  }
  CHECK(r.n_alpha_p.value == 0.0);
}

TEST_CASE("degenerate ensemble reproduces the deterministic sup") {
  MomentAccumulator acc(3.0, {1.0}, 3);
  const std::vector<double> u = {0.5, -2.0, 1.0};
  for (std::uint32_t p = 0; p < 30; ++p) {
    std::vector<double> row;
    for (double v : u) row.push_back(std::pow(std::abs(v), 3.0));
    acc.add(p, row);
  }
  const auto r = estimate_moments(acc, 0.5);
  CHECK(r.sup_moment[0].value == Approx(8.0));
  CHECK(r.argmax[0] == 1);
  CHECK(r.sup_moment[0].ci_lo == Approx(8.0));
  CHECK(r.n_alpha_p.value == Approx(std::exp(-0.5) * 2.0));
}

TEST_CASE("moment estimates and preconditions") {
  const auto acc = gaussian_ensemble(2000, 3);
  const auto r = estimate_moments(acc, 0.0);
  // Point 2 has variance 9 at both times.
  CHECK(r.argmax[0] == 2);
  CHECK(std::abs(r.sup_moment[0].value - 9.0) < 4 * r.sup_moment[0].std_error);
  CHECK(r.sup_moment[0].ci_lo < 9.0 + 4 * r.sup_moment[0].std_error);
  CHECK_THROWS(estimate_moments(gaussian_ensemble(20, 3), 0.0));
  MomentAccumulator low(1.5, {1.0}, 1);
  for (std::uint32_t p = 0; p < 40; ++p) low.add(p, std::vector<double>{1.0});
  CHECK_THROWS(estimate_moments(low, 0.0));
  MomentAccumulator dup(2.0, {1.0}, 1);
  dup.add(0, std::vector<double>{1.0});
  CHECK_THROWS(dup.add(0, std::vector<double>{1.0}));
}

TEST_CASE("merging in any order gives identical reports") {
  const auto all = gaussian_ensemble(90, 5);
  MomentAccumulator a(2.0, {0.5, 1.0}, 3), b(2.0, {0.5, 1.0}, 3), c(2.0, {0.5, 1.0}, 3);
  for (const auto& [p, row] : all.rows()) (p % 3 == 0 ? a : p % 3 == 1 ? b : c).add(p, row);
  MomentAccumulator abc = a, cba = c;
  abc.merge(b);
  abc.merge(c);
  cba.merge(b);
  cba.merge(a);
  const auto r1 = estimate_moments(abc, 0.1), r2 = estimate_moments(cba, 0.1), r0 = estimate_moments(all, 0.1);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(r1.sup_moment[i].value == r2.sup_moment[i].value);
    CHECK(r1.sup_moment[i].ci_lo == r2.sup_moment[i].ci_lo);
    CHECK(r1.sup_moment[i].ci_hi == r0.sup_moment[i].ci_hi);
  }
}

TEST_CASE("bootstrap interval narrows like one over root n") {
  double w1 = 0, w2 = 0;
  for (std::uint64_t s = 0; s < 8; ++s) {
    const auto r1 = estimate_moments(gaussian_ensemble(400, 100 + s), 0.0);
    const auto r2 = estimate_moments(gaussian_ensemble(800, 200 + s), 0.0);
    w1 += r1.sup_moment[1].ci_hi - r1.sup_moment[1].ci_lo;
    w2 += r2.sup_moment[1].ci_hi - r2.sup_moment[1].ci_lo;
  }
  CHECK(w2 / w1 == Approx(1.0 / std::sqrt(2.0)).epsilon(0.12));
}

TEST_CASE("growth envelope") {
  MomentReport rep;
  rep.p = 2.0;
  rep.times = {0.25, 0.5, 0.75, 1.0};
  for (double t : rep.times) rep.sup_moment.push_back({std::exp(3.0 * t), 0, 0, 0});
  GrowthInput in;
  in.lip_drift = 1.0;
  in.lip_diffusion = 0.1;
  auto v = check_growth_envelope(rep, in);
  CHECK_FALSE(v.refused);
  CHECK(v.slope == Approx(3.0));
  CHECK(v.rate == Approx(4.0));
  CHECK(v.pass);
  CHECK(rep.envelope.rate == Approx(4.0));

  in.lip_drift = 0.4;
  v = check_growth_envelope(rep, in);
  CHECK_FALSE(v.pass);

  // p above L(b)/(4 L(sigma)^2) = 1/(4 * 0.09) ~ 2.78.
  rep.p = 3.0;
  in.lip_drift = 1.0;
  in.lip_diffusion = 0.3;
  v = check_growth_envelope(rep, in);
  CHECK(v.refused);

  MomentReport zero;
  zero.p = 2.0;
  zero.times = {0.5, 1.0};
  zero.sup_moment.assign(2, Estimate{});
  in.lip_diffusion = 0.0;
  v = check_growth_envelope(zero, in);
  CHECK(v.pass);
  CHECK(v.slope == 0.0);
}

TEST_CASE("line fit") {
  const std::vector<double> x = {0, 1, 2, 3, 4}, y = {1, 3, 5, 7, 9};
  const auto f = fit_line(x, y);
  CHECK(f.slope == Approx(2.0));
  CHECK(f.intercept == Approx(1.0));
  CHECK(f.slope_error == Approx(0.0).epsilon(1e-12));
  const std::vector<double> y2 = {0, 1.1, 1.9, 3.2, 3.9};
  const auto g = fit_line(x, y2);
  CHECK(g.ci_lo < g.slope);
  CHECK(g.ci_hi > g.slope);
}

TEST_CASE("structure functions on deterministic fields") {
  GridSpec g;
  g.dim = 1;
  g.L = 1.0;
  g.n = 64;
  std::vector<double> u(64);
  for (std::size_t j = 0; j < 64; ++j) u[j] = std::sin(2 * M_PI * j / 64.0);
  const auto s = spatial_structure(g, u, {1, 2}, 2.0);
  // Mean of |sin(a + h) - sin a|^2 over a full period is 1 - cos h.
  CHECK(s[0] == Approx(1 - std::cos(2 * M_PI / 64)));
  CHECK(s[1] == Approx(1 - std::cos(4 * M_PI / 64)));
  std::vector<double> v(64, 1.0);
  const auto t = temporal_structure(g, u, {std::span<const double>(v)}, 2.0);
  double ref = 0;
  for (double x : u) ref += (1 - x) * (1 - x);
  CHECK(t[0] == Approx(ref / 64));
}

TEST_CASE("Holder fit is invariant to lag rescaling and checks its preconditions") {
  StructureAccumulator acc(5);
  const std::vector<double> lags = {1, 2, 4, 8, 16};
  for (std::uint32_t p = 0; p < 100; ++p) {
    std::vector<double> row;
    for (double h : lags) row.push_back(std::pow(h, 2 * 0.3) * (1 + 0.01 * (p % 3)));
    acc.add(p, row);
  }
  HolderOptions o;
  o.target = 0.3;
  const auto r = estimate_holder(acc, lags, Direction::Space, o);
  CHECK(r.exponent == Approx(0.3));
  CHECK(r.pass);
  std::vector<double> scaled;
  for (double h : lags) scaled.push_back(h * 0.001);
  CHECK(estimate_holder(acc, scaled, Direction::Space, o).exponent == Approx(r.exponent).epsilon(1e-12));
  StructureAccumulator narrow(4);
  for (std::uint32_t p = 0; p < 100; ++p) narrow.add(p, {1, 2, 3, 4});
  CHECK_THROWS(estimate_holder(narrow, {1, 2, 3, 4}, Direction::Space, o));
  o.min_paths = 200;
  CHECK_THROWS(estimate_holder(acc, lags, Direction::Space, o));
}

TEST_CASE("Holder estimator recovers fractional Brownian exponents") {
  const std::size_t n = 2048;
  const std::vector<std::size_t> lags = {2, 4, 8, 16, 32, 64};
  std::vector<double> phys;
  for (auto h : lags) phys.push_back(static_cast<double>(h) / n);
  for (double H : {0.3, 0.5, 0.7}) {
    StructureAccumulator acc(lags.size());
    for (std::uint32_t p = 0; p < 100; ++p) {
      const auto b = fractional_brownian_motion(H, n, 42, p);
      std::vector<double> row;
      for (auto h : lags) {
        double s = 0;
        for (std::size_t j = 0; j + h <= n; ++j) s += std::pow(b[j + h] - b[j], 2);
        row.push_back(s / static_cast<double>(n + 1 - h));
      }
      acc.add(p, row);
    }
    HolderOptions o;
    o.target = H;
    o.margin = 0.05;
    const auto r = estimate_holder(acc, phys, Direction::Space, o);
    INFO("H=" << H << " fitted=" << r.exponent);
    CHECK(r.pass);
    // Variance of the unit-time increment is 1.
    CHECK(r.structure[2] == Approx(std::pow(phys[2], 2 * H)).epsilon(0.05));
  }
}
