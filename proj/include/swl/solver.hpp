#pragma once
// Time stepping of the mild equation on the periodic box: a spectral
// trigonometric integrator (exact free propagation per Fourier mode, forcing
// evaluated at the left point), a Picard iteration for small d = 1 grids, and
// the truncation-level monitor used by blow-up experiments.

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "swl/kernels.hpp"
#include "swl/model.hpp"
#include "swl/noise.hpp"

namespace swl {

class RealFft;

struct StateSnapshot {
  double t = 0.0;
  std::vector<double> u;
  std::vector<double> v;  // may be empty when velocities are not kept
};

class BlowupSignal : public std::runtime_error {
 public:
  BlowupSignal(std::size_t step, double t);
  std::size_t step;
  double t;
};

// First times the sup over the observation ball reaches each level.
struct BlowupMonitor {
  std::vector<double> levels;  // ascending
  double radius = 0.0;
  double horizon = 0.0;
  std::vector<double> tau;     // horizon when never hit
  std::vector<char> hit;

  BlowupMonitor() = default;
  BlowupMonitor(std::vector<double> levels, double radius, double horizon);
  void observe(double t, double sup_abs);
  void mark_all(double t);  // non-finite state: every pending level is hit now
  bool all_hit() const;
};

struct PathResult {
  std::uint64_t seed = 0;
  std::uint32_t path = 0;
  std::vector<StateSnapshot> snapshots;
  BlowupMonitor monitor;
  double max_abs = 0.0;  // sup over the visited steps and the observation ball
  bool non_finite = false;
  std::size_t steps_taken = 0;
};

// Writes the forcing noise for step `step` (density per cell, as produced by
// NoiseSampler) into `out`.
using NoiseProvider = std::function<void(std::size_t step, std::span<double> out)>;

struct SolverSetup {
  GridSpec grid;
  KernelSpec kernel = KernelSpec::white_noise();
  CoefficientPair coeff;
  InitialData init;
  double radius = 1.0;                 // observation ball B(0, R)
  std::vector<double> output_times;    // multiples of dt within [0, T]
  std::vector<double> levels;          // monitor ladder, ascending
  bool stop_when_all_hit = false;
  bool keep_velocity = true;
};

// Grid samples of u0 and v0.
std::vector<double> sample_field(const GridSpec& grid, const FieldFn& f);

// Indices of grid points with |x| <= radius.
std::vector<std::size_t> ball_indices(const GridSpec& grid, double radius);

class Stepper {
 public:
  explicit Stepper(const GridSpec& grid);
  ~Stepper();
  Stepper(const Stepper&) = delete;
  Stepper& operator=(const Stepper&) = delete;

  void set_state(std::span<const double> u, std::span<const double> v, double t = 0.0);
  // One step of length dt; throws BlowupSignal on non-finite output.
  void step(const CoefficientPair& coeff, std::span<const double> noise);

  double time() const { return t_; }
  std::size_t steps() const { return steps_; }
  std::span<const double> u() const { return u_; }
  std::vector<double> velocity();
  // Discrete energy (1/2)|v|^2 + (1/2)|grad u|^2, with |.| the grid L2 norm.
  double energy() const;

 private:
  GridSpec grid_;
  std::unique_ptr<RealFft> fft_;
  std::vector<std::complex<double>> uh_, vh_;
  std::vector<double> cos_, sinc_, wsin_, omega_, weight_;
  std::vector<double> u_;
  double t_ = 0.0;
  double start_ = 0.0;
  std::size_t steps_ = 0;

  void refresh_u();
};

// Single step from a snapshot; convenience wrapper over Stepper.
StateSnapshot step(const StateSnapshot& state, const CoefficientPair& coeff, const NoiseIncrement& noise);

// Evolves one path. Without a provider the noise comes from NoiseSampler with
// key (seed, path, step).
PathResult run_path(const SolverSetup& setup, std::uint64_t seed, std::uint32_t path,
                    const NoiseProvider& provider = {});

// Runs paths first..first+count-1 on `threads` workers and hands each result
// to `consume` in path order.
void run_paths(const SolverSetup& setup, std::uint64_t seed, std::uint32_t first, std::uint32_t count,
               unsigned threads, const std::function<void(PathResult&&)>& consume);

struct PicardResult {
  std::size_t n = 0;
  std::size_t steps = 0;
  // iterates[k] holds (steps + 1) x n values, time-major.
  std::vector<std::vector<double>> iterates;
  // sup |u^{k+1} - u^k| over the whole space-time grid.
  std::vector<double> increments;
};

inline constexpr std::size_t kPicardMaxPoints = 256;
inline constexpr std::size_t kPicardMaxSteps = 256;

// d = 1 Picard iteration of the mild form with cell-exact kernel integrals and
// the same noise for every iterate.
PicardResult picard_solve(const SolverSetup& setup, std::uint64_t seed, std::size_t iterations,
                          const NoiseProvider& provider = {});

struct BlowupRow {
  double level = 0.0;
  std::size_t hits = 0;
  std::size_t replicas = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct BlowupTable {
  std::vector<BlowupRow> rows;
  std::vector<std::vector<double>> tau;      // tau[path][level]
  std::vector<std::vector<char>> hit;        // hit[path][level]
  bool per_path_monotone = true;
};

// Clopper-Pearson interval for k successes in n trials.
std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double confidence = 0.95);

// One run per level with coefficients truncated at that level, sharing seeds
// across levels.
BlowupTable blowup_experiment(const SolverSetup& setup, const std::vector<double>& levels, std::size_t replicas,
                              std::uint64_t seed, unsigned threads = 1, double confidence = 0.95);

// Binary snapshot: magic "SWLSNAP1", header (dim, n, L, dt, t, seed, path,
// has_v), then u and optionally v as float64.
struct SnapshotHeader {
  int dim = 1;
  std::uint64_t n = 0;
  double L = 0.0;
  double dt = 0.0;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t path = 0;
};
void write_snapshot(std::ostream& os, const SnapshotHeader& h, const StateSnapshot& s);
StateSnapshot read_snapshot(std::istream& is, SnapshotHeader& h);

}  // namespace swl
