#pragma once
// Monte Carlo estimators over path ensembles: pointwise moments with bootstrap
// intervals, the exponential growth check, and structure-function exponents.
// Accumulators store per-path contributions keyed by path index and reduce in
// index order, so merging partial ensembles in any order gives identical
// reports.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "swl/noise.hpp"
#include "swl/solver.hpp"

namespace swl::stats {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct BootstrapOptions {
  std::size_t resamples = 400;
  double confidence = 0.95;
  std::uint64_t seed = 1;
};

// Per path: |u(t_i, x_j)|^p for each output time i and observation point j.
class MomentAccumulator {
 public:
  MomentAccumulator() = default;
  MomentAccumulator(double p, std::vector<double> times, std::size_t points);

  void add(std::uint32_t path, std::span<const double> values);  // times x points, time-major
  // Convenience: snapshots of one path, restricted to `points` (grid indices).
  void add(const PathResult& r, const std::vector<std::size_t>& points);
  void merge(const MomentAccumulator& other);

  double p() const { return p_; }
  const std::vector<double>& times() const { return times_; }
  std::size_t points() const { return points_; }
  std::size_t paths() const { return rows_.size(); }
  const std::map<std::uint32_t, std::vector<double>>& rows() const { return rows_; }

 private:
  double p_ = 2.0;
  std::vector<double> times_;
  std::size_t points_ = 0;
  std::map<std::uint32_t, std::vector<double>> rows_;
};

struct GrowthEnvelope {
  double c_drift = 0.0, c_diffusion = 0.0, lip_drift = 0.0, lip_diffusion = 0.0;
  double rate = 0.0;  // 2 p sqrt(L(b))
};

struct MomentReport {
  double p = 2.0;
  double alpha = 0.0;
  std::size_t paths = 0;
  std::vector<double> times;
  std::vector<Estimate> sup_moment;   // sup_x E|u(t, x)|^p per time
  std::vector<std::size_t> argmax;    // observation point attaining the sup
  Estimate n_alpha_p;                 // max_t e^{-alpha t} (sup_x E|u|^p)^{1/p}
  GrowthEnvelope envelope;
};

inline constexpr std::size_t kMinMomentPaths = 30;

MomentReport estimate_moments(const MomentAccumulator& acc, double alpha, const BootstrapOptions& opts = {});

struct GrowthInput {
  int dim = 1;
  double c_mu = 0.0;
  double lip_drift = 0.0;
  double lip_diffusion = 0.0;
  double c_drift = 0.0;
  double c_diffusion = 0.0;
  double margin = 0.15;  // relative slack on the rate
};

struct GrowthVerdict {
  bool refused = false;
  bool pass = false;
  double slope = 0.0;
  double slope_error = 0.0;
  double rate = 0.0;
  double limit = 0.0;
  MomentInterval admissible;
  std::string message;
};

// Fits the slope of t -> log sup_x E|u|^p over [T/4, T] and compares with
// 2 p sqrt(L(b)) (1 + margin).
GrowthVerdict check_growth_envelope(MomentReport& report, const GrowthInput& in);

// ---------------------------------------------------------------- structure functions

enum class Direction { Space, Time };
std::string to_string(Direction d);

// Mean over base points of |u(x + h e_a) - u(x)|^p, averaged over axes a, for
// each lag h (in grid cells). Base points are restricted to |x| <= window when
// window > 0.
std::vector<double> spatial_structure(const GridSpec& grid, std::span<const double> u,
                                      const std::vector<std::size_t>& lags, double p, double window = 0.0);

// Mean over grid points of |u(t0 + tau_k) - u(t0)|^p: `base` is u(t0),
// `shifted[k]` is u(t0 + tau_k).
std::vector<double> temporal_structure(const GridSpec& grid, std::span<const double> base,
                                       const std::vector<std::span<const double>>& shifted, double p,
                                       double window = 0.0);

class StructureAccumulator {
 public:
  StructureAccumulator() = default;
  explicit StructureAccumulator(std::size_t lags) : lags_(lags) {}
  void add(std::uint32_t path, std::vector<double> values);
  void merge(const StructureAccumulator& other);
  std::size_t paths() const { return rows_.size(); }
  std::size_t lags() const { return lags_; }
  std::vector<double> mean() const;
  std::vector<double> std_error() const;

 private:
  std::size_t lags_ = 0;
  std::map<std::uint32_t, std::vector<double>> rows_;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t points = 0;
};

// OLS fit of y on x with a Student-t interval on the slope.
LineFit fit_line(std::span<const double> x, std::span<const double> y, double confidence = 0.95);

struct HolderOptions {
  double p = 2.0;
  double target = 0.5;
  double margin = 0.07;
  bool one_sided = false;      // pass when exponent >= target - margin
  bool drop_smallest = true;   // exclude the smallest lag from the fit
  std::size_t min_paths = 100;
  double confidence = 0.95;
};

struct HolderReport {
  Direction direction = Direction::Space;
  std::vector<double> lags;      // physical lags
  std::vector<double> structure;
  std::vector<double> structure_error;
  std::vector<char> used;        // lags entering the fit
  double exponent = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double target = 0.0;
  double margin = 0.0;
  bool pass = false;
  std::size_t paths = 0;
};

// Exponent = (slope of log S_p against log h) / p over the retained lags;
// requires at least 4 retained lags spanning at least two octaves.
HolderReport estimate_holder(const StructureAccumulator& acc, const std::vector<double>& lags, Direction direction,
                             const HolderOptions& opts);

// Smaller of two directional exponents (the exponent for |t - s| + |x - y|).
HolderReport joint_exponent(const HolderReport& space, const HolderReport& time);

// Fractional Brownian motion on [0, 1] at n + 1 points (B(0) = 0) by
// circulant embedding; n must be a power of two.
std::vector<double> fractional_brownian_motion(double hurst, std::size_t n, std::uint64_t seed, std::uint32_t path);

}  // namespace swl::stats
