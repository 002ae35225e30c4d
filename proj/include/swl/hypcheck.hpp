#pragma once
// Numerical checks of the noise hypotheses for a kernel: finiteness of the
// spectral integrals, the small-time rate of the Green energy, the increment
// exponents of the covariance density against pairs of wave kernels, and the
// resulting Holder exponent table.

#include <string>
#include <vector>

#include "swl/kernels.hpp"

namespace swl::hyp {

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct RateFit {
  std::vector<double> xs;        // t or h grid
  std::vector<double> values;    // integral values
  std::vector<double> errors;    // standard errors (Monte Carlo) or quadrature estimates
  double fitted = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double theory = 0.0;           // theoretical exponent (sup of the admissible range where open)
  Verdict verdict = Verdict::Fail;
  std::string message;
};

// Dyadic grid 2^lo, ..., 2^hi.
std::vector<double> dyadic_grid(int lo, int hi);

// Log-log slope of t -> int |FG(t)|^2 g. Riesz/Fractional/white: two-sided
// within `tolerance`; Bessel: one-sided, fitted <= min(2, kappa - d + 2) + tolerance.
RateFit fit_h3_rate(const KernelSpec& spec, const std::vector<double>& t_grid = dyadic_grid(-8, -2),
                    double tolerance = 0.05);

struct IncrementOptions {
  double horizon = 1.0;         // s ranges over [0, horizon]
  std::size_t samples = 1000000;  // Monte Carlo draws (d = 2, Fractional d = 3)
  std::uint64_t seed = 1;
  double margin_b = 0.1;        // pass when fitted >= theory - margin
  double margin_bbar = 0.2;
  double endpoint_band = 0.05;  // Bessel: fits this close to the endpoint are inconclusive
  double trend_band = 0.05;     // short fits whose small-h slope exceeds the large-h slope by this are inconclusive
};

struct IncrementIntegrals {
  double first = 0.0;     // one-sided difference integral, scale h^b
  double second = 0.0;    // rectangular difference integral, scale h^bbar
  double first_error = 0.0;
  double second_error = 0.0;
};

// The two increment integrals at each h (h = 0 gives exactly zero).
std::vector<IncrementIntegrals> increment_integrals(const KernelSpec& spec, const std::vector<double>& h_grid,
                                                    const IncrementOptions& opts = {});

struct IncrementFit {
  RateFit b;
  RateFit bbar;
};

// Default h grid per route. Isotropic kernels need small h because the local slopes
// approach their limits with logarithmic corrections.
std::vector<double> default_h4_grid(const KernelSpec& spec);

// An empty grid selects default_h4_grid(spec).
IncrementFit fit_h4_exponents(const KernelSpec& spec, const std::vector<double>& h_grid = {},
                              const IncrementOptions& opts = {});

struct ExponentTable {
  double gamma = 0.0;        // sup of admissible gamma
  double nu = 0.0;
  double b = 0.0;
  double bbar = 0.0;
  double alpha_tilde = 0.0;  // min(1 + nu, 2)
  double nu1 = 0.0;
  double nu2 = 0.0;
  double conclusion = 0.0;   // family-specific joint Holder exponent
};

ExponentTable critical_exponent_table(const KernelSpec& spec, double gamma1, double gamma2);

struct GammaProbe {
  double gamma = 0.0;
  double value = 0.0;
  bool diverges = false;
};

struct HypothesisReport {
  KernelSpec kernel;
  double c_mu = 0.0;
  bool c_mu_diverges = false;
  std::vector<GammaProbe> gamma_scan;
  double detected_gamma_max = 0.0;  // first diverging grid value
  RateFit h3;
  bool has_h4 = false;
  IncrementFit h4;
  ExponentTable table;
};

HypothesisReport check_hypotheses(const KernelSpec& spec, bool with_h4, const IncrementOptions& opts = {});

}  // namespace swl::hyp
