#include "swl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "swl/quadrature.hpp"

namespace swl {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double sphere_area(int d) {  // |S^{d-1}|
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double hurst_sum(const KernelSpec& s) {
  return std::accumulate(s.hurst.begin(), s.hurst.end(), 0.0);
}

double fractional_prefactor(const KernelSpec& s) {  // C(H)
  double c = 1.0;
  for (double h : s.hurst) c *= h * (2.0 * h - 1.0);
  return c;
}

double fractional_axis_constant(double h) {  // F(|x|^{2h-2}) = a |xi|^{1-2h}
  return riesz_fourier_constant(1, 2.0 - 2.0 * h);
}

// int_{S^{d-1}} prod |w_i|^{1-2H_i} dw times C(H) prod a_i.
double fractional_angular_mass(const KernelSpec& s) {
  double num = 2.0 * fractional_prefactor(s);
  for (double h : s.hurst) num *= fractional_axis_constant(h) * std::tgamma(1.0 - h);
  return num / std::tgamma(static_cast<double>(s.dim) - hurst_sum(s));
}

// int_0^inf sin^2(r) r^{-p} dr for 1 < p < 3.
double sin2_power_integral(double p) {
  return std::pow(2.0, p - 3.0) * kPi / (std::tgamma(p) * std::sin(0.5 * kPi * (p - 1.0)));
}

// int_{[-1,1]^d} |u|^{beta-d} du, via the 2d faces of the cube.
double cube_power_mass(int d, double beta) {
  if (d == 1) return 2.0 / beta;
  const auto rule = quad::gauss_legendre(48, -1.0, 1.0);
  double face = 0.0;
  if (d == 2) {
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double a = rule.nodes[i];
      face += rule.weights[i] * std::pow(1.0 + a * a, 0.5 * (beta - 2.0));
    }
  } else {
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double a = rule.nodes[i], b = rule.nodes[j];
        face += rule.weights[i] * rule.weights[j] * std::pow(1.0 + a * a + b * b, 0.5 * (beta - 3.0));
      }
  }
  return 2.0 * d * face / beta;
}

}  // namespace

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::WhiteNoise: return "white";
    case KernelFamily::Riesz: return "riesz";
    case KernelFamily::Bessel: return "bessel";
    case KernelFamily::Fractional: return "fractional";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& s) {
  if (s == "white") return KernelFamily::WhiteNoise;
  if (s == "riesz") return KernelFamily::Riesz;
  if (s == "bessel") return KernelFamily::Bessel;
  if (s == "fractional") return KernelFamily::Fractional;
  throw std::invalid_argument(fmt::format("unknown kernel family '{}'", s));
}

KernelSpec KernelSpec::white_noise() { return unchecked(KernelFamily::WhiteNoise, 1, 0, 0, {}); }

KernelSpec KernelSpec::riesz(int dim, double beta) {
  auto s = unchecked(KernelFamily::Riesz, dim, beta, 0, {});
  s.validate();
  return s;
}

KernelSpec KernelSpec::bessel(int dim, double kappa) {
  auto s = unchecked(KernelFamily::Bessel, dim, 0, kappa, {});
  s.validate();
  return s;
}

KernelSpec KernelSpec::fractional(std::vector<double> hurst) {
  const int d = static_cast<int>(hurst.size());
  auto s = unchecked(KernelFamily::Fractional, d, 0, 0, std::move(hurst));
  s.validate();
  return s;
}

KernelSpec KernelSpec::unchecked(KernelFamily family, int dim, double beta, double kappa,
                                 std::vector<double> hurst) {
  KernelSpec s;
  s.family = family;
  s.dim = dim;
  s.beta = beta;
  s.kappa = kappa;
  s.hurst = std::move(hurst);
  return s;
}

void KernelSpec::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("kernel: dimension must be 1, 2 or 3");
  switch (family) {
    case KernelFamily::WhiteNoise:
      if (dim != 1) throw std::invalid_argument("kernel: white noise only in dimension 1");
      break;
    case KernelFamily::Riesz:
      if (!(beta > 0.0 && beta < std::min(2.0, static_cast<double>(dim))))
        throw std::invalid_argument(
            fmt::format("kernel: Riesz beta={} outside (0, min(2, d)) for d={}", beta, dim));
      break;
    case KernelFamily::Bessel:
      if (!(kappa > std::max(0.0, dim - 2.0)))
        throw std::invalid_argument(
            fmt::format("kernel: Bessel kappa={} must exceed max(0, d-2)={}", kappa, std::max(0, dim - 2)));
      break;
    case KernelFamily::Fractional: {
      if (static_cast<int>(hurst.size()) != dim)
        throw std::invalid_argument("kernel: need one Hurst index per axis");
      for (double h : hurst)
        if (!(h > 0.5 && h < 1.0))
          throw std::invalid_argument(fmt::format("kernel: Hurst index {} outside (1/2, 1)", h));
      if (!(kappa_bar() > 0.0))
        throw std::invalid_argument("kernel: sum of Hurst indices must exceed d - 1");
      break;
    }
  }
}

std::string KernelSpec::params_string() const {
  switch (family) {
    case KernelFamily::WhiteNoise: return "d=1";
    case KernelFamily::Riesz: return fmt::format("d={};beta={}", dim, beta);
    case KernelFamily::Bessel: return fmt::format("d={};kappa={}", dim, kappa);
    case KernelFamily::Fractional: return fmt::format("d={};H={}", dim, fmt::join(hurst, "/"));
  }
  return {};
}

double KernelSpec::kappa_bar() const { return hurst_sum(*this) - (dim - 1); }

double riesz_constant(int dim, double beta) {
  return std::pow(2.0, -beta + 0.5 * dim) * std::tgamma(0.5 * (dim - beta)) / std::tgamma(0.5 * beta);
}

double bessel_constant(int dim, double kappa) {
  return std::pow(kPi, -0.5 * dim) * std::tgamma(0.5 * kappa);
}

double riesz_fourier_constant(int dim, double beta) {
  return std::pow(2.0 * kPi, 0.5 * dim) * riesz_constant(dim, beta);
}

double covariance_radial(const KernelSpec& spec, double r) {
  switch (spec.family) {
    case KernelFamily::Riesz:
      return r == 0.0 ? kInf : std::pow(r, -spec.beta);
    case KernelFamily::Bessel: {
      const double nu = 0.5 * (spec.kappa - spec.dim);
      if (r == 0.0) return nu > 0.0 ? std::tgamma(nu) : kInf;
      return 2.0 * std::pow(0.5 * r, nu) * std::cyl_bessel_k(std::abs(nu), r);
    }
    default:
      throw std::invalid_argument("covariance_radial: kernel is not isotropic with a density");
  }
}

double covariance_density(const KernelSpec& spec, std::span<const double> x) {
  if (static_cast<int>(x.size()) != spec.dim)
    throw std::invalid_argument("covariance_density: point dimension mismatch");
  switch (spec.family) {
    case KernelFamily::WhiteNoise:
      throw std::invalid_argument("covariance_density: white noise has no density");
    case KernelFamily::Riesz:
      return covariance_radial(spec, norm(x));
    case KernelFamily::Bessel: {
      const double r = norm(x);
      const double expo = 0.5 * (spec.kappa - spec.dim - 2.0);
      if (r == 0.0) return spec.kappa > spec.dim ? std::tgamma(0.5 * (spec.kappa - spec.dim)) : kInf;
      const double q = 0.25 * r * r;
      auto integrand = [&](double w) {
        if (w <= 0.0) return 0.0;
        return std::exp(expo * std::log(w) - w - q / w);
      };
      return quad::half_line(integrand, 1.0, {1e-300, 1e-10, 2000}).value;
    }
    case KernelFamily::Fractional: {
      double v = fractional_prefactor(spec);
      for (int i = 0; i < spec.dim; ++i) {
        if (x[i] == 0.0) return kInf;
        v *= std::pow(std::abs(x[i]), 2.0 * spec.hurst[i] - 2.0);
      }
      return v;
    }
  }
  return 0.0;
}

double spectral_radial(const KernelSpec& spec, double r) {
  switch (spec.family) {
    case KernelFamily::WhiteNoise:
      return 1.0;
    case KernelFamily::Riesz:
      if (r == 0.0) throw std::domain_error("spectral_density: Riesz density is singular at the origin");
      return riesz_fourier_constant(spec.dim, spec.beta) * std::pow(r, spec.beta - spec.dim);
    case KernelFamily::Bessel:
      return std::pow(4.0 * kPi, 0.5 * spec.dim) * std::tgamma(0.5 * spec.kappa) *
             std::pow(1.0 + r * r, -0.5 * spec.kappa);
    case KernelFamily::Fractional:
      throw std::invalid_argument("spectral_radial: fractional kernel is anisotropic");
  }
  return 0.0;
}

double spectral_density(const KernelSpec& spec, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != spec.dim)
    throw std::invalid_argument("spectral_density: point dimension mismatch");
  if (spec.family != KernelFamily::Fractional) return spectral_radial(spec, norm(xi));
  double v = fractional_prefactor(spec);
  for (int i = 0; i < spec.dim; ++i) {
    if (xi[i] == 0.0)
      throw std::domain_error("spectral_density: fractional density is singular on the axes");
    v *= fractional_axis_constant(spec.hurst[i]) * std::pow(std::abs(xi[i]), 1.0 - 2.0 * spec.hurst[i]);
  }
  return v;
}

double spectral_radial_mass(const KernelSpec& spec, double r) {
  const int d = spec.dim;
  switch (spec.family) {
    case KernelFamily::WhiteNoise:
      return 2.0;
    case KernelFamily::Riesz:
      return sphere_area(d) * riesz_fourier_constant(d, spec.beta) * std::pow(r, spec.beta - 1.0);
    case KernelFamily::Bessel:
      return sphere_area(d) * std::pow(r, d - 1.0) * spectral_radial(spec, r);
    case KernelFamily::Fractional: {
      const double e = 2.0 * d - 1.0 - 2.0 * hurst_sum(spec);
      return fractional_angular_mass(spec) * std::pow(r, e);
    }
  }
  return 0.0;
}

double spectral_cell_mass(const KernelSpec& spec, std::span<const int> k, double box_side) {
  const int d = spec.dim;
  const double step = 2.0 * kPi / box_side;
  const double half = 0.5 * step;
  double xi[3] = {0, 0, 0};
  bool origin = true;
  for (int i = 0; i < d; ++i) {
    xi[i] = step * k[i];
    origin = origin && k[i] == 0;
  }
  const double volume = std::pow(step, d);
  switch (spec.family) {
    case KernelFamily::WhiteNoise:
    case KernelFamily::Bessel:
      return spectral_density(spec, {xi, static_cast<std::size_t>(d)}) * volume;
    case KernelFamily::Riesz:
      if (origin)
        return riesz_fourier_constant(d, spec.beta) * std::pow(half, spec.beta) * cube_power_mass(d, spec.beta);
      return spectral_density(spec, {xi, static_cast<std::size_t>(d)}) * volume;
    case KernelFamily::Fractional: {
      double v = fractional_prefactor(spec);
      for (int i = 0; i < d; ++i) {
        const double h = spec.hurst[i];
        const double a = fractional_axis_constant(h);
        if (k[i] == 0)
          v *= a * 2.0 * std::pow(half, 2.0 - 2.0 * h) / (2.0 - 2.0 * h);
        else
          v *= a * std::pow(std::abs(xi[i]), 1.0 - 2.0 * h) * step;
      }
      return v;
    }
  }
  return 0.0;
}

double truncated_c_mu(const KernelSpec& spec, double gamma, double upper) {
  const double e = 2.0 - 2.0 * gamma;
  quad::Tolerance tol{1e-14, 1e-10, 2000};
  auto head = [&](double r) { return spectral_radial_mass(spec, r) / (1.0 + std::pow(r, e)); };
  double v = quad::finite(head, 0.0, std::min(1.0, upper), tol).value;
  if (upper > 1.0) {
    auto tail = [&](double u) {
      const double r = std::exp(u);
      return spectral_radial_mass(spec, r) * r / (1.0 + std::pow(r, e));
    };
    v += quad::finite(tail, 0.0, std::log(upper), tol).value;
  }
  return v * std::pow(2.0 * kPi, -spec.dim);
}

DivergenceProbe probe_c_mu(const KernelSpec& spec, double gamma, double upper) {
  DivergenceProbe p;
  p.value = truncated_c_mu(spec, gamma, upper);
  p.extended = truncated_c_mu(spec, gamma, 4.0 * upper);
  p.relative_change = std::abs(p.extended - p.value) / std::max(std::abs(p.value), 1e-300);
  p.diverges = p.relative_change > 0.10;
  return p;
}

double spectral_energy(const KernelSpec& spec, double t) {
  if (t < 0.0) throw std::domain_error("spectral_energy: negative time");
  if (t == 0.0) return 0.0;
  const double norm_d = std::pow(2.0 * kPi, -spec.dim);
  switch (spec.family) {
    case KernelFamily::WhiteNoise:
      return 0.5 * t;
    case KernelFamily::Riesz: {
      const double p = 3.0 - spec.beta;
      return norm_d * sphere_area(spec.dim) * riesz_fourier_constant(spec.dim, spec.beta) *
             std::pow(t, 2.0 - spec.beta) * sin2_power_integral(p);
    }
    case KernelFamily::Fractional: {
      const double kb = spec.kappa_bar();
      return norm_d * fractional_angular_mass(spec) * std::pow(t, 2.0 * kb) * sin2_power_integral(2.0 * kb + 1.0);
    }
    case KernelFamily::Bessel: {
      auto w = [&](double r) {
        if (r == 0.0) return 0.0;
        return 0.5 * spectral_radial_mass(spec, r) / (r * r);
      };
      // sin^2(tr) = (1 - cos 2tr)/2; the head absorbs the r -> 0 cancellation.
      auto head_weight = [&](double r) {
        const double s = std::sin(t * r);
        return r == 0.0 ? 0.0 : spectral_radial_mass(spec, r) * s * s / (r * r);
      };
      const double head_end = std::max(1.0, 16.0 * kPi / (2.0 * t));
      std::vector<double> breaks;
      for (double b = kPi / t; b < head_end; b += kPi / t) breaks.push_back(b);
      double v = quad::with_breaks(head_weight, 0.0, head_end, breaks, {1e-15, 1e-10, 4000}).value;
      v += quad::upper_tail(w, head_end, {1e-15, 1e-10, 4000}).value;
      v -= quad::fourier_tail(w, head_end, 2.0 * t, false, 1e-13 * std::max(v, 1e-3)).value;
      return norm_d * v;
    }
  }
  return 0.0;
}

KernelAnalytics compute_analytics(const KernelSpec& spec, double gamma) {
  spec.validate();
  KernelAnalytics a;
  const int d = spec.dim;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  switch (spec.family) {
    case KernelFamily::WhiteNoise:
      a.gamma_max = 0.5;
      a.nu = {1.0, true};
      a.b = {nan, false};
      a.bbar = {nan, false};
      break;
    case KernelFamily::Riesz: {
      const double s = 2.0 - spec.beta;
      a.gamma_max = 0.5 * s;
      a.nu = {s, true};
      a.b = {std::min(s, 1.0), false};
      a.bbar = {s, false};
      break;
    }
    case KernelFamily::Bessel: {
      const double s = spec.kappa - d + 2.0;
      a.gamma_max = std::min(0.5 * s, 1.0);
      a.nu = {std::min(2.0, s), false};
      a.b = {std::min(s, 1.0), false};
      a.bbar = {std::min(s, 2.0), false};
      break;
    }
    case KernelFamily::Fractional: {
      const double kb = spec.kappa_bar();
      double hmin = *std::min_element(spec.hurst.begin(), spec.hurst.end());
      a.gamma_max = kb;
      a.nu = {2.0 * kb, true};
      a.b = {std::min(2.0 * kb, 2.0 * hmin - 1.0), false};
      a.bbar = a.b;
      break;
    }
  }
  a.gamma = gamma < 0.0 ? 0.5 * a.gamma_max : gamma;
  if (!(a.gamma < a.gamma_max))
    throw std::domain_error(fmt::format("compute_analytics: gamma={} not below gamma_max={}", a.gamma, a.gamma_max));

  quad::Tolerance tol{1e-12, 1e-8, 2000};
  const double norm_d = std::pow(2.0 * kPi, -d);
  auto weighted = [&](double e) {
    auto f = [&, e](double r) { return spectral_radial_mass(spec, r) / (1.0 + std::pow(r, e)); };
    return norm_d * quad::half_line(f, 1.0, tol).value;
  };
  a.c_mu = weighted(2.0);
  a.c_mu_gamma = weighted(2.0 - 2.0 * a.gamma);
  return a;
}

}  // namespace swl
