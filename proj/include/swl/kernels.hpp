#pragma once
// Spatial covariance kernels of the driving noise: real-space density f,
// spectral density g (forward Fourier transform of f, so that
// int int phi(x) phi(y) f(x-y) = (2pi)^-d int |F phi|^2 g), and the integral
// constants and exponents derived from g.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace swl {

enum class KernelFamily { WhiteNoise, Riesz, Bessel, Fractional };

std::string to_string(KernelFamily f);
KernelFamily kernel_family_from_string(const std::string& s);

struct KernelSpec {
  KernelFamily family = KernelFamily::WhiteNoise;
  int dim = 1;
  double beta = 0.0;           // Riesz exponent
  double kappa = 0.0;          // Bessel order
  std::vector<double> hurst;   // Fractional indices, one per axis

  // Validated constructors.
  static KernelSpec white_noise();
  static KernelSpec riesz(int dim, double beta);
  static KernelSpec bessel(int dim, double kappa);
  static KernelSpec fractional(std::vector<double> hurst);
  // No range checks; for probing divergence outside the admissible set.
  static KernelSpec unchecked(KernelFamily family, int dim, double beta, double kappa,
                              std::vector<double> hurst);

  void validate() const;
  bool isotropic() const { return family != KernelFamily::Fractional; }
  std::string params_string() const;
  // Sum of Hurst indices minus (d - 1); Fractional only.
  double kappa_bar() const;
};

// Conventional constants: unitary-FT Riesz constant and the
// (2pi)^-d-normalized Bessel constant.
double riesz_constant(int dim, double beta);
double bessel_constant(int dim, double kappa);

// Forward-FT constant A with F(|x|^-beta) = A |xi|^(beta-d).
double riesz_fourier_constant(int dim, double beta);

double covariance_density(const KernelSpec& spec, std::span<const double> x);
// Radial profile f(r) for isotropic kernels. Bessel goes through K_nu
// instead of the w-integral; both agree (see tests).
double covariance_radial(const KernelSpec& spec, double r);

double spectral_density(const KernelSpec& spec, std::span<const double> xi);
// g(|xi|) for isotropic kernels.
double spectral_radial(const KernelSpec& spec, double r);

// Radial mass density m(r) of the spectral measure: for radial phi,
// int g(xi) phi(|xi|) dxi = int_0^inf m(r) phi(r) dr.
double spectral_radial_mass(const KernelSpec& spec, double r);

// Total g-mass of the grid cell centred on mode k of a box of side L
// (cell side 2pi/L). Closed form on the singular set; midpoint elsewhere.
double spectral_cell_mass(const KernelSpec& spec, std::span<const int> k, double box_side);

struct ExponentBound {
  double value = 0.0;
  bool attained = false;  // true: exponent value itself admissible
};

struct KernelAnalytics {
  double c_mu = 0.0;        // (2pi)^-d int g/(1+|xi|^2)
  double gamma = 0.0;       // gamma used for c_mu_gamma
  double c_mu_gamma = 0.0;  // (2pi)^-d int g/(1+|xi|^(2-2 gamma))
  double gamma_max = 0.0;   // sup of gamma keeping c_mu_gamma finite
  ExponentBound nu;         // small-time rate of int |FG(t)|^2 g
  ExponentBound b;          // first-difference regularity exponent
  ExponentBound bbar;       // second-difference regularity exponent
};

// gamma < 0 selects gamma_max / 2.
KernelAnalytics compute_analytics(const KernelSpec& spec, double gamma = -1.0);

// (2pi)^-d int |FG(t)|^2 g; closed form for power-law kernels.
double spectral_energy(const KernelSpec& spec, double t);

// Radial integral int_0^R m(r) w(r) dr with w = 1/(1+r^(2-2 gamma)),
// used for divergence probing.
double truncated_c_mu(const KernelSpec& spec, double gamma, double upper);

struct DivergenceProbe {
  double value = 0.0;
  double extended = 0.0;
  double relative_change = 0.0;
  bool diverges = false;
};
// Compares the integral on [0, R] with [0, 4R]; flags divergence when the
// extension changes the value by more than 10%.
DivergenceProbe probe_c_mu(const KernelSpec& spec, double gamma, double upper = 1e4);

}  // namespace swl
