#include "swl/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "swl/greens.hpp"
#include "swl/quadrature.hpp"

namespace swl {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

struct Table {
  std::vector<double> z, b, s;
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(fmt::format("coefficients: cannot open table '{}'", path));
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double z, b, s;
    if (!(ss >> z >> b >> s)) continue;  // header or malformed row
    if (!t.z.empty() && !(z > t.z.back()))
      throw std::invalid_argument("coefficients: table abscissae must increase");
    t.z.push_back(z);
    t.b.push_back(b);
    t.s.push_back(s);
  }
  if (t.z.size() < 2) throw std::invalid_argument("coefficients: table needs at least two rows");
  return t;
}

ScalarFn interpolant(std::vector<double> z, std::vector<double> v) {
  return [z = std::move(z), v = std::move(v)](double x) {
    if (x <= z.front()) return v.front();
    if (x >= z.back()) return v.back();
    const auto it = std::upper_bound(z.begin(), z.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - z.begin()) - 1;
    const double w = (x - z[i]) / (z[i + 1] - z[i]);
    return (1.0 - w) * v[i] + w * v[i + 1];
  };
}

double max_slope(const std::vector<double>& z, const std::vector<double>& v) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) m = std::max(m, std::abs((v[i + 1] - v[i]) / (z[i + 1] - z[i])));
  return m;
}

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

double ln_plus(double z) { return std::log(std::max(z, std::numbers::e)); }

std::string to_string(CoefficientFamily f) {
  switch (f) {
    case CoefficientFamily::Linear: return "linear";
    case CoefficientFamily::Superlinear: return "superlinear";
    case CoefficientFamily::Tabulated: return "tabulated";
  }
  return "unknown";
}

CoefficientFamily coefficient_family_from_string(const std::string& s) {
  if (s == "linear") return CoefficientFamily::Linear;
  if (s == "superlinear") return CoefficientFamily::Superlinear;
  if (s == "tabulated") return CoefficientFamily::Tabulated;
  throw std::invalid_argument(fmt::format("unknown coefficient family '{}'", s));
}

CoefficientPair make_linear(double b0, double lambda, double s0, double eta) {
  CoefficientPair c;
  c.family = CoefficientFamily::Linear;
  c.drift = [b0, lambda](double z) { return b0 + lambda * z; };
  c.diffusion = [s0, eta](double z) { return s0 + eta * z; };
  c.theta1 = std::abs(b0);
  c.theta2 = std::abs(lambda);
  c.sigma1 = std::abs(s0);
  c.sigma2 = std::abs(eta);
  c.delta = c.a = 0.0;
  c.lip_drift = std::abs(lambda);
  c.lip_diffusion = std::abs(eta);
  return c;
}

CoefficientPair make_coefficients(const CoefficientSpec& spec) {
  switch (spec.family) {
    case CoefficientFamily::Linear: {
      auto c = make_linear(spec.b0, spec.lambda, spec.s0, spec.eta);
      if (spec.lip_drift) c.lip_drift = spec.lip_drift;
      if (spec.lip_diffusion) c.lip_diffusion = spec.lip_diffusion;
      return c;
    }
    case CoefficientFamily::Superlinear: {
      if (spec.delta < 0.0 || spec.a < 0.0) throw std::invalid_argument("coefficients: growth exponents must be >= 0");
      if (spec.theta2 < 0.0 || spec.sigma2 < 0.0) throw std::invalid_argument("coefficients: growth constants must be >= 0");
      CoefficientPair c;
      c.family = CoefficientFamily::Superlinear;
      const double t1 = spec.theta1, t2 = spec.theta2, de = spec.delta;
      const double s1 = spec.sigma1, s2 = spec.sigma2, a = spec.a;
      c.drift = [=](double z) { return t1 + t2 * z * std::pow(ln_plus(std::abs(z)), de); };
      c.diffusion = [=](double z) { return s1 + s2 * z * std::pow(ln_plus(std::abs(z)), a); };
      c.theta1 = std::abs(t1);
      c.theta2 = t2;
      c.delta = de;
      c.sigma1 = std::abs(s1);
      c.sigma2 = s2;
      c.a = a;
      c.lip_drift = spec.lip_drift;
      c.lip_diffusion = spec.lip_diffusion;
      return c;
    }
    case CoefficientFamily::Tabulated: {
      Table t = read_table(spec.table_path);
      CoefficientPair c;
      c.family = CoefficientFamily::Tabulated;
      c.lip_drift = spec.lip_drift.value_or(max_slope(t.z, t.b));
      c.lip_diffusion = spec.lip_diffusion.value_or(max_slope(t.z, t.s));
      c.theta1 = std::abs(spec.theta1);
      c.theta2 = spec.theta2;
      c.delta = spec.delta;
      c.sigma1 = std::abs(spec.sigma1);
      c.sigma2 = spec.sigma2;
      c.a = spec.a;
      c.drift = interpolant(t.z, t.b);
      c.diffusion = interpolant(std::move(t.z), std::move(t.s));
      return c;
    }
  }
  throw std::invalid_argument("coefficients: unknown family");
}

ScalarFn truncate(ScalarFn g, double level) {
  if (!(level > 0.0)) throw std::invalid_argument("truncate: level must be positive");
  const double hi = g(level), lo = g(-level);
  return [g = std::move(g), level, hi, lo](double x) {
    if (x > level) return hi;
    if (x < -level) return lo;
    return g(x);
  };
}

CoefficientPair truncate(const CoefficientPair& c, double level) {
  CoefficientPair t = c;
  t.drift = truncate(c.drift, level);
  t.diffusion = truncate(c.diffusion, level);
  if (level >= 2.0 && !c.lip_drift) {
    const auto k = truncated_constants(c, level);
    t.lip_drift = k.lip_drift;
    t.lip_diffusion = k.lip_diffusion;
  }
  return t;
}

TruncatedConstants truncated_constants(const CoefficientPair& c, double level) {
  if (!(level >= 2.0)) throw std::invalid_argument("truncated_constants: level must be >= 2");
  const double l = std::log(2.0 * level);
  return {c.theta1, c.sigma1, c.theta2 * std::pow(l, c.delta), c.sigma2 * std::pow(l, c.a)};
}

MomentInterval moment_interval(int dim, double lip_drift, double lip_diffusion, double c_mu) {
  MomentInterval m;
  if (lip_diffusion == 0.0) {
    m.hi = kInf;
    return m;
  }
  const double s2 = lip_diffusion * lip_diffusion;
  if (dim == 1) {
    m.hi = lip_drift / (4.0 * s2);
  } else {
    if (!(c_mu > 0.0)) throw std::invalid_argument("moment_interval: C_mu must be positive for d >= 2");
    m.hi = std::sqrt(lip_drift) / (96.0 * c_mu * s2);
  }
  return m;
}

DominationReport check_domination(const CoefficientPair& c, const DominationInput& in) {
  DominationReport r;
  if (in.dim == 1) {
    if (!(in.gamma > 0.0)) throw std::invalid_argument("check_domination: gamma must be positive");
    if (c.delta > 2.0 * c.a && !nearly_equal(c.delta, 2.0 * c.a)) {
      r.satisfied = true;
      r.clause = 1;
      r.message = fmt::format("log-growth domination satisfied (delta={} > 2a={})", c.delta, 2.0 * c.a);
    } else if (nearly_equal(c.delta, 2.0 * c.a)) {
      const double need = 8.0 / in.gamma * c.sigma2 * c.sigma2;
      r.satisfied = c.theta2 > need;
      r.clause = r.satisfied ? 2 : 0;
      r.message = fmt::format("log-growth domination {} (delta = 2a, theta2={} vs (8/gamma) sigma2^2={}; "
                              "generic form needs theta2 > bargamma sigma2^2 for some bargamma > 0)",
                              r.satisfied ? "satisfied" : "violated", c.theta2, need);
    } else {
      r.message = fmt::format("log-growth domination violated (delta={} < 2a={})", c.delta, 2.0 * c.a);
    }
    r.theorem_covers = r.satisfied && c.delta < 2.0;
    r.theorem_message = c.delta < 2.0 ? "global existence in d=1 covered (delta < 2)"
                                      : "global existence in d=1 requires delta<2: NOT covered";
  } else {
    if (c.delta > 4.0 * c.a && !nearly_equal(c.delta, 4.0 * c.a)) {
      r.satisfied = true;
      r.clause = 1;
      r.message = fmt::format("log-growth domination satisfied (delta={} > 4a={})", c.delta, 4.0 * c.a);
    } else if (nearly_equal(c.delta, 4.0 * c.a)) {
      if (!(in.nu1 > 0.0 && in.nu2 > 0.0)) throw std::invalid_argument("check_domination: nu1, nu2 must be positive");
      const double k = 1.0 / in.nu1 + in.dim / in.nu2;
      const double need = 4096.0 * 9.0 * in.c_mu * in.c_mu * std::pow(c.sigma2, 4) * k * k;
      r.satisfied = c.theta2 > need;
      r.clause = r.satisfied ? 2 : 0;
      r.message = fmt::format("log-growth domination {} (delta = 4a, theta2={} vs threshold {})",
                              r.satisfied ? "satisfied" : "violated", c.theta2, need);
    } else {
      r.message = fmt::format("log-growth domination violated (delta={} < 4a={})", c.delta, 4.0 * c.a);
    }
    r.theorem_covers = r.satisfied && c.delta < 0.5;
    r.theorem_message = c.delta < 0.5 ? fmt::format("global existence in d={} covered (delta < 1/2)", in.dim)
                                      : fmt::format("global existence in d={} requires delta<1/2: NOT covered", in.dim);
  }
  for (double level : in.levels) {
    const auto k = truncated_constants(c, level);
    auto m = moment_interval(in.dim, k.lip_drift, k.lip_diffusion, in.c_mu);
    m.level = level;
    r.intervals.push_back(m);
  }
  return r;
}

// ---------------------------------------------------------------- initial data

std::string to_string(InitialFamily f) {
  switch (f) {
    case InitialFamily::Zero: return "zero";
    case InitialFamily::Trigonometric: return "trig";
    case InitialFamily::Bump: return "bump";
    case InitialFamily::Weierstrass: return "weierstrass";
  }
  return "unknown";
}

InitialFamily initial_family_from_string(const std::string& s) {
  if (s == "zero") return InitialFamily::Zero;
  if (s == "trig") return InitialFamily::Trigonometric;
  if (s == "bump") return InitialFamily::Bump;
  if (s == "weierstrass") return InitialFamily::Weierstrass;
  throw std::invalid_argument(fmt::format("unknown initial-data family '{}'", s));
}

InitialData make_initial_data(const InitialSpec& spec, int dim, double box_side, std::size_t n) {
  InitialData d;
  const double A = spec.amplitude, B = spec.velocity;
  switch (spec.family) {
    case InitialFamily::Zero: {
      d.u0 = d.v0 = d.lap_u0 = [](std::span<const double>) { return 0.0; };
      d.grad_u0 = [](std::span<const double>, std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); };
      d.rho = 0.0;
      break;
    }
    case InitialFamily::Trigonometric: {
      const double k = 2.0 * kPi * spec.mode / box_side;
      d.u0 = [=](std::span<const double> x) { return A * std::cos(k * x[0]); };
      d.v0 = [=](std::span<const double> x) { return B * std::cos(k * x[0]); };
      d.grad_u0 = [=](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = -A * k * std::sin(k * x[0]);
      };
      d.lap_u0 = [=](std::span<const double> x) { return -A * k * k * std::cos(k * x[0]); };
      d.rho = kInf;
      d.sup_u0 = std::abs(A);
      d.sup_v0 = std::abs(B);
      break;
    }
    case InitialFamily::Bump: {
      // (1 - |x|^2/rho^2)^3 inside the ball: C^2 with compact support.
      const double rho = spec.rho;
      if (!(rho > 0.0)) throw std::invalid_argument("initial data: bump radius must be positive");
      const double r2 = rho * rho;
      auto bump = [=](std::span<const double> x) {
        const double s = norm2(x) / r2;
        return s < 1.0 ? (1.0 - s) * (1.0 - s) * (1.0 - s) : 0.0;
      };
      d.u0 = [=](std::span<const double> x) { return A * bump(x); };
      d.v0 = [=](std::span<const double> x) { return B * bump(x); };
      d.grad_u0 = [=](std::span<const double> x, std::span<double> g) {
        const double s = norm2(x) / r2;
        const double q1 = s < 1.0 ? -3.0 * (1.0 - s) * (1.0 - s) : 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = A * q1 * 2.0 * x[i] / r2;
      };
      d.lap_u0 = [=](std::span<const double> x) {
        const double s = norm2(x) / r2;
        if (s >= 1.0) return 0.0;
        const double q1 = -3.0 * (1.0 - s) * (1.0 - s), q2 = 6.0 * (1.0 - s);
        return A * (q2 * 4.0 * s / r2 + q1 * 2.0 * static_cast<double>(x.size()) / r2);
      };
      d.rho = rho;
      d.sup_u0 = std::abs(A);
      d.sup_v0 = std::abs(B);
      break;
    }
    case InitialFamily::Weierstrass: {
      // Lacunary cosine sum along the first axis with exponent `holder`,
      // truncated to octaves the grid resolves (top frequency <= n/16 modes).
      const double h = spec.holder;
      if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("initial data: Weierstrass exponent must be in (0, 1]");
      const double k = 2.0 * kPi * spec.mode / box_side;
      int octaves = 0;
      while ((static_cast<double>(spec.mode) * std::pow(2.0, octaves)) <= static_cast<double>(n) / 16.0) ++octaves;
      octaves = std::max(octaves, 1);
      double sup = 0.0;
      for (int j = 0; j < octaves; ++j) sup += std::pow(2.0, -j * h);
      d.u0 = [=](std::span<const double> x) {
        double v = 0.0;
        for (int j = 0; j < octaves; ++j) {
          const double f = std::pow(2.0, j);
          v += std::pow(f, -h) * std::cos(f * k * x[0] + 2.39996322972865332 * j);
        }
        return A * v;
      };
      d.v0 = [](std::span<const double>) { return 0.0; };
      d.gamma1 = h;
      d.rho = kInf;
      d.sup_u0 = std::abs(A) * sup;
      break;
    }
  }
  (void)dim;
  return d;
}

double initial_term(const InitialData& data, int dim, double t, std::span<const double> x) {
  if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("initial_term: point dimension mismatch");
  if (t < 0.0) throw std::domain_error("initial_term: negative time");
  if (t == 0.0) return data.u0(x);
  switch (dim) {
    case 1: {
      const double a[1] = {x[0] - t}, b[1] = {x[0] + t};
      return greens::integrate(1, t, data.v0, x) + 0.5 * (data.u0(a) + data.u0(b));
    }
    case 2: {
      if (!data.grad_u0) throw std::invalid_argument("initial_term: d=2 needs the gradient of u0");
      const double wave = greens::integrate(2, t, data.v0, x);
      const double mean = greens::integrate(2, t, data.u0, x);
      // d/dt of the theta-substituted Poisson integral.
      const auto theta = quad::gauss_legendre(64, 0.0, 0.5 * kPi);
      const std::size_t na = 128;
      const double da = 2.0 * kPi / na;
      double acc = 0.0;
      double p[2], g[2];
      for (std::size_t j = 0; j < na; ++j) {
        const double al = (j + 0.5) * da, ca = std::cos(al), sa = std::sin(al);
        for (std::size_t i = 0; i < theta.nodes.size(); ++i) {
          const double s = std::sin(theta.nodes[i]);
          p[0] = x[0] + t * s * ca;
          p[1] = x[1] + t * s * sa;
          data.grad_u0(p, g);
          acc += theta.weights[i] * s * s * (g[0] * ca + g[1] * sa);
        }
      }
      return wave + mean / t + t * acc * da / (2.0 * kPi);
    }
    default: {
      if (!data.lap_u0) throw std::invalid_argument("initial_term: d=3 needs the Laplacian of u0");
      const double wave = greens::integrate(3, t, data.v0, x);
      const double mean = greens::integrate(3, t, data.u0, x) / t;
      // Ball mean of the Laplacian at radius t.
      const auto radial = quad::gauss_legendre(24, 0.0, 1.0);
      const auto sphere = quad::sphere_rule(24, 48);
      double acc = 0.0;
      double p[3];
      for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
        const double r = radial.nodes[i];
        double shell = 0.0;
        for (std::size_t k = 0; k < sphere.w.size(); ++k) {
          p[0] = x[0] + t * r * sphere.x[k];
          p[1] = x[1] + t * r * sphere.y[k];
          p[2] = x[2] + t * r * sphere.z[k];
          shell += sphere.w[k] * data.lap_u0(p);
        }
        acc += radial.weights[i] * r * r * shell;
      }
      const double ball_mean = 3.0 * acc / (4.0 * kPi);
      return wave + mean + t * t / 3.0 * ball_mean;
    }
  }
}

}  // namespace swl
