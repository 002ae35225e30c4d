#pragma once
// Thin wrappers over GSL adaptive quadrature plus fixed Gauss-Legendre and
// spherical product rules.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace swl::quad {

using Fn = std::function<double(double)>;

struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-8;
  std::size_t limit = 1000;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double value, double residual)
      : std::runtime_error(what), value_(value), residual_(residual) {}
  double value() const { return value_; }
  double residual() const { return residual_; }

 private:
  double value_;
  double residual_;
};

// Adaptive Gauss-Kronrod with extrapolation on [a, b]; copes with integrable
// endpoint singularities.
Result finite(const Fn& f, double a, double b, const Tolerance& tol = {});

// Same, with known interior singular points (sorted, inside (a, b)).
Result with_breaks(const Fn& f, double a, double b, std::vector<double> breaks,
                   const Tolerance& tol = {});

// Integral over [a, inf).
Result upper_tail(const Fn& f, double a, const Tolerance& tol = {});

// Integral over [0, inf), split at `split`.
Result half_line(const Fn& f, double split = 1.0, const Tolerance& tol = {});

// Integral of f(x) cos(omega x) (or sin) over [a, inf) by the QAWF cycle
// method. Only an absolute tolerance applies.
Result fourier_tail(const Fn& f, double a, double omega, bool sine,
                    double abs_tol = 1e-10);

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre on [a, b].
Rule gauss_legendre(std::size_t n, double a, double b);

// Product rule on the unit sphere S^2: Gauss-Legendre in cos(polar) times
// uniform azimuth. Weights sum to 4*pi.
struct SphereRule {
  std::vector<double> x, y, z, w;
};
SphereRule sphere_rule(std::size_t n_polar = 64, std::size_t n_azimuth = 128);

}  // namespace swl::quad
