#pragma once
// Drift/diffusion coefficient pairs with their growth metadata, truncation at
// a level N, the log-growth domination check with admissible moment orders,
// built-in initial data, and the free-wave initial term.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swl/kernels.hpp"

namespace swl {

using ScalarFn = std::function<double(double)>;
using FieldFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

// ln(max(z, e)).
double ln_plus(double z);

enum class CoefficientFamily { Linear, Superlinear, Tabulated };
std::string to_string(CoefficientFamily f);
CoefficientFamily coefficient_family_from_string(const std::string& s);

struct CoefficientSpec {
  CoefficientFamily family = CoefficientFamily::Linear;
  // Linear: b(z) = b0 + lambda z, sigma(z) = s0 + eta z.
  double b0 = 0.0, lambda = 0.0, s0 = 1.0, eta = 0.0;
  // Superlinear: b(z) = theta1 + theta2 z ln_+(|z|)^delta,
  //              sigma(z) = sigma1 + sigma2 z ln_+(|z|)^a.
  double theta1 = 0.0, theta2 = 1.0, delta = 1.0, sigma1 = 0.0, sigma2 = 0.1, a = 0.25;
  // Tabulated: CSV rows "z,b,sigma", piecewise linear, constant beyond the ends.
  std::string table_path;
  // Optional declared Lipschitz constants (required for Tabulated growth checks).
  std::optional<double> lip_drift, lip_diffusion;
};

struct CoefficientPair {
  ScalarFn drift;
  ScalarFn diffusion;
  CoefficientFamily family = CoefficientFamily::Linear;
  // Growth metadata |b(z)| <= theta1 + theta2 |z| ln_+(|z|)^delta, same for sigma.
  double theta1 = 0.0, theta2 = 0.0, delta = 0.0;
  double sigma1 = 0.0, sigma2 = 0.0, a = 0.0;
  std::optional<double> lip_drift, lip_diffusion;
};

CoefficientPair make_coefficients(const CoefficientSpec& spec);
CoefficientPair make_linear(double b0, double lambda, double s0, double eta);

// g on [-N, N], frozen at g(+-N) outside.
ScalarFn truncate(ScalarFn g, double level);
CoefficientPair truncate(const CoefficientPair& c, double level);

struct TruncatedConstants {
  double bound_drift;      // |b_N(0)|
  double bound_diffusion;  // |sigma_N(0)|
  double lip_drift;        // theta2 ln(2N)^delta
  double lip_diffusion;    // sigma2 ln(2N)^a
};
TruncatedConstants truncated_constants(const CoefficientPair& c, double level);

struct MomentInterval {
  double level = 0.0;
  double lo = 2.0;
  double hi = 0.0;
  bool empty() const { return hi < lo; }
};

// Admissible moment orders for Lipschitz constants (lb, ls).
// d = 1: [2, lb / (4 ls^2)]; d >= 2: [2, sqrt(lb) / (96 c_mu ls^2)].
MomentInterval moment_interval(int dim, double lip_drift, double lip_diffusion, double c_mu);

struct DominationInput {
  int dim = 1;
  double gamma = 0.5;   // d = 1 Holder parameter entering 8/gamma
  double c_mu = 0.0;    // d >= 2
  double nu1 = 0.0;     // d >= 2 spatial/temporal exponents
  double nu2 = 0.0;
  std::vector<double> levels;
};

struct DominationReport {
  bool satisfied = false;
  int clause = 0;          // 1: strict exponent gap, 2: equal exponents with constant margin
  std::string message;
  bool theorem_covers = false;
  std::string theorem_message;
  std::vector<MomentInterval> intervals;
};

DominationReport check_domination(const CoefficientPair& c, const DominationInput& in);

// ---------------------------------------------------------------- initial data

enum class InitialFamily { Zero, Trigonometric, Bump, Weierstrass };
std::string to_string(InitialFamily f);
InitialFamily initial_family_from_string(const std::string& s);

struct InitialSpec {
  InitialFamily family = InitialFamily::Zero;
  double amplitude = 1.0;    // u0 scale
  double velocity = 0.0;     // v0 scale
  double rho = 1.0;          // bump support radius
  int mode = 1;              // trigonometric wave number (periods per box)
  double holder = 0.5;       // Weierstrass exponent
};

struct InitialData {
  FieldFn u0;
  FieldFn v0;
  GradientFn grad_u0;  // empty when unavailable
  FieldFn lap_u0;      // empty when unavailable
  double gamma1 = 1.0;  // Holder exponent of u0
  double gamma2 = 1.0;  // Holder exponent of v0
  double rho = 0.0;     // support radius (infinite when not compact)
  double sup_u0 = 0.0;
  double sup_v0 = 0.0;
};

// `box_side` sets the period of periodic families; `n` bounds the number of
// Weierstrass octaves to what the grid resolves.
InitialData make_initial_data(const InitialSpec& spec, int dim, double box_side, std::size_t n);

// Free-wave solution at (t, x): G(t) * v0 + d/dt (G(t) * u0).
double initial_term(const InitialData& data, int dim, double t, std::span<const double> x);

}  // namespace swl
