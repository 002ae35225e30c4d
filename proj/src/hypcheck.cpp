#include "swl/hypcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "swl/quadrature.hpp"
#include "swl/rng.hpp"
#include "swl/stats.hpp"

namespace swl::hyp {
namespace {

constexpr double kPi = std::numbers::pi;

RateFit fit_rate(std::vector<double> xs, std::vector<double> values, std::vector<double> errors) {
  RateFit r;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0 && values[i] > 0.0)) continue;
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(values[i]));
  }
  if (lx.size() < 3) throw std::invalid_argument("rate fit: need at least three positive values");
  const auto f = stats::fit_line(lx, ly);
  r.fitted = f.slope;
  r.ci_lo = f.ci_lo;
  r.ci_hi = f.ci_hi;
  r.xs = std::move(xs);
  r.values = std::move(values);
  r.errors = std::move(errors);
  return r;
}

// Unit-sphere point from two uniforms.
void sphere_point(double u1, double u2, double* p) {
  const double z = 2.0 * u1 - 1.0, r = std::sqrt(std::max(0.0, 1.0 - z * z)), a = 2.0 * kPi * u2;
  p[0] = r * std::cos(a);
  p[1] = r * std::sin(a);
  p[2] = z;
}

// Density of G(1, dy) in d = 2.
double disk_density(const double* y) {
  const double r2 = y[0] * y[0] + y[1] * y[1];
  return r2 < 1.0 ? 1.0 / (2.0 * kPi * std::sqrt(1.0 - r2)) : 0.0;
}

// Log-scale span of the importance component around y = -z.
constexpr double kLogSpan = 30.0;

// Point of the unit disk distributed as G(1, dy) in d = 2.
void disk_point(double u1, double u2, double* p) {
  const double r = std::sqrt(std::max(0.0, 1.0 - u1 * u1)), a = 2.0 * kPi * u2;
  p[0] = r * std::cos(a);
  p[1] = r * std::sin(a);
}

std::vector<IncrementIntegrals> isotropic_3d(const KernelSpec& spec, const std::vector<double>& hs,
                                             const IncrementOptions& opts) {
  // With u = |y + z| for y, z uniform on the sphere (density u/2 on [0, 2]):
  // |s y + (s + h) z|^2 = h^2 + s (s + h) u^2.
  auto f = [&spec](double r) { return covariance_radial(spec, r); };
  const quad::Tolerance inner{1e-13, 1e-7, 1000}, outer{1e-12, 1e-6, 1000};
  std::vector<IncrementIntegrals> out;
  for (double h : hs) {
    IncrementIntegrals I;
    if (h == 0.0) {
      out.push_back(I);
      continue;
    }
    for (int which = 0; which < 2; ++which) {
      auto shell = [&](double s) {
        if (s <= 0.0) return 0.0;
        auto g = [&](double u) {
          if (u <= 0.0) return 0.0;
          const double a = f((s + h) * u), m = f(std::sqrt(h * h + s * (s + h) * u * u));
          const double v = which == 0 ? std::abs(a - m) : std::abs(a - 2.0 * m + f(s * u));
          return 0.5 * u * v;
        };
        const double kink = std::sqrt(h / (s + h));
        const double w = which == 0 ? s : s * s;
        return w * quad::with_breaks(g, 0.0, 2.0, {kink}, inner).value;
      };
      const auto r = quad::with_breaks(shell, 0.0, opts.horizon, {std::min(h, opts.horizon)}, outer);
      (which == 0 ? I.first : I.second) = r.value;
      (which == 0 ? I.first_error : I.second_error) = r.abs_error;
    }
    out.push_back(I);
  }
  return out;
}

std::vector<IncrementIntegrals> monte_carlo(const KernelSpec& spec, const std::vector<double>& hs,
                                            const IncrementOptions& opts) {
  const int d = spec.dim;
  const std::size_t nh = hs.size();
  std::vector<double> s1(nh, 0.0), q1(nh, 0.0), s2(nh, 0.0), q2(nh, 0.0);
  auto f = [&spec, d](const double* x) {
    if (spec.isotropic()) {
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) r2 += x[i] * x[i];
      return covariance_radial(spec, std::sqrt(r2));
    }
    return covariance_density(spec, std::span<const double>(x, static_cast<std::size_t>(d)));
  };
  double y[3], z[3], a[3], by[3], bz[3], c[3];
  for (std::size_t k = 0; k < opts.samples; ++k) {
    const auto u = uniform4({opts.seed, 0, static_cast<std::uint32_t>(k), Stream::MonteCarlo}, 0);
    const auto v = uniform4({opts.seed, 0, static_cast<std::uint32_t>(k), Stream::MonteCarlo}, 1);
    // Open interval draws keep the densities finite.
    auto open = [](double x) { return (x * 4294967296.0 + 0.5) / 4294967296.0; };
    const double s = opts.horizon * open(u[0]);
    double weight = 1.0;
    if (d == 2) {
      disk_point(open(u[3]), v[0], z);
      if (!spec.isotropic() || v[1] < 0.5) {
        disk_point(open(u[1]), u[2], y);
      } else {
        // y = -z + e with |e| log-uniform on [2 e^-L, 2].
        const double r = 2.0 * std::exp(-kLogSpan * u[1]), ang = 2.0 * kPi * u[2];
        y[0] = -z[0] + r * std::cos(ang);
        y[1] = -z[1] + r * std::sin(ang);
      }
      if (spec.isotropic()) {
        const double py = disk_density(y);
        if (py == 0.0) continue;
        const double w0 = y[0] + z[0], w1 = y[1] + z[1];
        const double rw = std::sqrt(w0 * w0 + w1 * w1);
        const double k = (rw >= 2.0 * std::exp(-kLogSpan) && rw <= 2.0) ? 1.0 / (2.0 * kPi * kLogSpan * rw * rw) : 0.0;
        weight = py / (0.5 * py + 0.5 * k);
      }
    } else {
      sphere_point(u[1], u[2], y);
      sphere_point(u[3], v[0], z);
    }
    for (int i = 0; i < d; ++i) c[i] = s * (y[i] + z[i]);
    const double fc = f(c);
    for (std::size_t j = 0; j < nh; ++j) {
      const double h = hs[j];
      for (int i = 0; i < d; ++i) {
        a[i] = c[i] + h * (y[i] + z[i]);
        by[i] = c[i] + h * y[i];
        bz[i] = c[i] + h * z[i];
      }
      const double fa = f(a), fz = f(bz);
      const double e1 = weight * opts.horizon * s * std::abs(fa - fz);
      const double e2 = weight * opts.horizon * s * s * std::abs(fa - f(by) - fz + fc);
      s1[j] += e1;
      q1[j] += e1 * e1;
      s2[j] += e2;
      q2[j] += e2 * e2;
    }
  }
  const double n = static_cast<double>(opts.samples);
  std::vector<IncrementIntegrals> out(nh);
  for (std::size_t j = 0; j < nh; ++j) {
    out[j].first = s1[j] / n;
    out[j].second = s2[j] / n;
    out[j].first_error = std::sqrt(std::max(0.0, q1[j] / n - out[j].first * out[j].first) / n);
    out[j].second_error = std::sqrt(std::max(0.0, q2[j] / n - out[j].second * out[j].second) / n);
  }
  return out;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::vector<double> dyadic_grid(int lo, int hi) {
  std::vector<double> g;
  for (int k = lo; k <= hi; ++k) g.push_back(std::ldexp(1.0, k));
  return g;
}

RateFit fit_h3_rate(const KernelSpec& spec, const std::vector<double>& t_grid, double tolerance) {
  spec.validate();
  std::vector<double> values;
  for (double t : t_grid) values.push_back(spectral_energy(spec, t));
  RateFit r = fit_rate(t_grid, values, std::vector<double>(t_grid.size(), 0.0));
  const auto an = compute_analytics(spec);
  r.theory = an.nu.value;
  if (spec.family == KernelFamily::Bessel) {
    r.verdict = r.fitted <= r.theory + tolerance ? Verdict::Pass : Verdict::Fail;
    r.message = fmt::format("nu fitted {:.4f} <= min(2, kappa-d+2) + {} = {:.4f}", r.fitted, tolerance,
                            r.theory + tolerance);
  } else {
    r.verdict = std::abs(r.fitted - r.theory) <= tolerance ? Verdict::Pass : Verdict::Fail;
    r.message = fmt::format("nu fitted {:.4f} vs {:.4f} (tolerance {})", r.fitted, r.theory, tolerance);
  }
  return r;
}

std::vector<IncrementIntegrals> increment_integrals(const KernelSpec& spec, const std::vector<double>& h_grid,
                                                    const IncrementOptions& opts) {
  spec.validate();
  if (spec.dim != 2 && spec.dim != 3) throw std::invalid_argument("increment integrals: d must be 2 or 3");
  for (double h : h_grid)
    if (h < 0.0 || h > opts.horizon) throw std::invalid_argument("increment integrals: h must lie in [0, T]");
  if (spec.dim == 3 && spec.isotropic()) return isotropic_3d(spec, h_grid, opts);
  auto out = monte_carlo(spec, h_grid, opts);
  for (std::size_t j = 0; j < h_grid.size(); ++j)
    if (h_grid[j] == 0.0) out[j] = {};
  return out;
}

std::vector<double> default_h4_grid(const KernelSpec& spec) {
  if (spec.isotropic() && spec.dim == 3) return dyadic_grid(-28, -18);
  if (spec.isotropic() && spec.dim == 2) return dyadic_grid(-14, -9);
  return dyadic_grid(-7, -2);
}

IncrementFit fit_h4_exponents(const KernelSpec& spec, const std::vector<double>& grid,
                              const IncrementOptions& opts) {
  const auto& h_grid = grid.empty() ? default_h4_grid(spec) : grid;
  const auto I = increment_integrals(spec, h_grid, opts);
  std::vector<double> v1, e1, v2, e2;
  for (const auto& x : I) {
    v1.push_back(x.first);
    e1.push_back(x.first_error);
    v2.push_back(x.second);
    e2.push_back(x.second_error);
  }
  IncrementFit fit{fit_rate(h_grid, v1, e1), fit_rate(h_grid, v2, e2)};
  const auto an = compute_analytics(spec);
  fit.b.theory = an.b.value;
  fit.bbar.theory = an.bbar.value;
  auto judge = [&](RateFit& r, double margin, const char* name) {
    // Slopes over the small-h and large-h halves of the grid.
    const std::size_t half = r.xs.size() / 2;
    double small_h = r.fitted, large_h = r.fitted;
    if (half >= 3) {
      auto part = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> x(r.xs.begin() + lo, r.xs.begin() + hi), v(r.values.begin() + lo, r.values.begin() + hi),
            e(r.errors.begin() + lo, r.errors.begin() + hi);
        return fit_rate(x, v, e).fitted;
      };
      small_h = part(0, half);
      large_h = part(r.xs.size() - half, r.xs.size());
    }
    std::string note;
    if (spec.family == KernelFamily::Bessel && std::abs(r.fitted - r.theory) <= opts.endpoint_band) {
      r.verdict = Verdict::Inconclusive;
      note = " (within endpoint band)";
    } else if (r.fitted >= r.theory - margin) {
      r.verdict = Verdict::Pass;
    } else if (small_h > large_h + opts.trend_band) {
      r.verdict = Verdict::Inconclusive;
      note = fmt::format(" (slope still rising: {:.4f} at small h, {:.4f} at large h)", small_h, large_h);
    } else {
      r.verdict = Verdict::Fail;
    }
    r.message = fmt::format("{} fitted {:.4f} vs range sup {:.4f} (margin {}): {}{}", name, r.fitted, r.theory, margin,
                            to_string(r.verdict), note);
  };
  judge(fit.b, opts.margin_b, "b");
  judge(fit.bbar, opts.margin_bbar, "bbar");
  return fit;
}

ExponentTable critical_exponent_table(const KernelSpec& spec, double gamma1, double gamma2) {
  spec.validate();
  ExponentTable t;
  const int d = spec.dim;
  switch (spec.family) {
    case KernelFamily::WhiteNoise:
      t.gamma = 0.5;
      t.nu = 1.0;
      t.b = t.bbar = std::numeric_limits<double>::quiet_NaN();
      t.alpha_tilde = 2.0;
      t.nu1 = t.nu2 = t.conclusion = std::min(gamma1, 0.5);
      return t;
    case KernelFamily::Riesz:
      t.gamma = 0.5 * (2.0 - spec.beta);
      t.nu = 2.0 - spec.beta;
      t.b = std::min(2.0 - spec.beta, 1.0);
      t.bbar = 2.0 - spec.beta;
      t.conclusion = std::min({0.5 * (2.0 - spec.beta), gamma1, gamma2});
      break;
    case KernelFamily::Bessel: {
      const double s = spec.kappa - d + 2.0;
      t.gamma = std::min(0.5 * s, 1.0);
      t.nu = std::min(2.0, s);
      t.b = std::min(s, 1.0);
      t.bbar = std::min(s, 2.0);
      t.conclusion = std::min({0.5 * s, 1.0, gamma1, gamma2});
      break;
    }
    case KernelFamily::Fractional: {
      const double kb = spec.kappa_bar();
      const double hmin = *std::min_element(spec.hurst.begin(), spec.hurst.end());
      t.gamma = kb;
      t.nu = 2.0 * kb;
      t.b = t.bbar = std::min(2.0 * kb, 2.0 * hmin - 1.0);
      t.conclusion = std::min({gamma1, gamma2, kb, hmin - 0.5});
      break;
    }
  }
  t.alpha_tilde = std::min(1.0 + t.nu, 2.0);
  t.nu1 = std::min({t.gamma, gamma1, gamma2});
  t.nu2 = std::min({t.nu1, 0.5 * (t.nu1 + std::min(t.b, 1.0)), 0.5 * (1.0 + t.nu), 0.5 * (t.b + 1.0), 0.5 * t.bbar,
                    0.5 * t.alpha_tilde});
  return t;
}

HypothesisReport check_hypotheses(const KernelSpec& spec, bool with_h4, const IncrementOptions& opts) {
  spec.validate();
  HypothesisReport r;
  r.kernel = spec;
  r.h3 = fit_h3_rate(spec);
  r.table = critical_exponent_table(spec, 1.0, 1.0);
  if (spec.family != KernelFamily::WhiteNoise) {
    r.c_mu = compute_analytics(spec).c_mu;
    r.c_mu_diverges = probe_c_mu(spec, 0.0).diverges;
    r.detected_gamma_max = 1.0;
    bool found = false;
    for (int k = 1; k < 20; ++k) {
      const double g = 0.05 * k;
      const auto p = probe_c_mu(spec, g);
      r.gamma_scan.push_back({g, p.value, p.diverges});
      if (p.diverges && !found) {
        r.detected_gamma_max = g;
        found = true;
      }
    }
  } else {
    r.c_mu = compute_analytics(spec).c_mu;
  }
  if (with_h4 && spec.dim >= 2) {
    r.has_h4 = true;
    r.h4 = fit_h4_exponents(spec, {}, opts);
  }
  return r;
}

}  // namespace swl::hyp
