#pragma once
// Fundamental solution of the wave operator in d = 1, 2, 3: pointwise density
// (d <= 2), Fourier multiplier, integration against test functions, and the
// two-kernel covariance pairing computed by a real-space and a spectral route.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "swl/kernels.hpp"

namespace swl::greens {

using TestFn = std::function<double(std::span<const double>)>;

// Density of G(t, .) at x; d = 3 has no density (surface measure).
double density(int dim, double t, std::span<const double> x);

// sin(t r) / r, with the r -> 0 limit t.
double fourier(double t, double r);

struct QuadratureOrder {
  std::size_t polar = 64;    // Gauss-Legendre points in the polar/radial angle
  std::size_t azimuth = 128; // uniform azimuth points
};

// int phi(center + y) G(t, dy). With an empty center this is int phi G(t, .);
// by symmetry of G it equals (G(t) * phi)(center) otherwise.
double integrate(int dim, double t, const TestFn& phi, std::span<const double> center = {},
                 const QuadratureOrder& order = {});

struct PairingResult {
  double real_space = 0.0;
  double spectral = 0.0;
  double discrepancy = 0.0;  // |real - spectral| / max(|spectral|, tiny)
  bool flagged = false;      // discrepancy above 1%
};

// int int G(t, dx) G(s, dy) f(x - y + shift).
PairingResult pairing(double t, double s, const KernelSpec& spec, std::span<const double> shift = {});

double pairing_real_space(double t, double s, const KernelSpec& spec, std::span<const double> shift = {});
double pairing_spectral(double t, double s, const KernelSpec& spec, std::span<const double> shift = {});

struct Check {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Identity battery: masses, scaling, d=1 transform, G^2 = G/2, multiplier
// bound, J(t) bound, cross-route pairing.
std::vector<Check> invariant_battery(bool include_pairings = true);

}  // namespace swl::greens
