#pragma once
// Space-time noise increments on a periodic grid. White noise (d = 1) is drawn
// cell by cell, keyed by the cell's signed offset from the origin so that a
// larger box reproduces the same values on the shared cells. Colored noise is
// white noise filtered in Fourier space to the kernel's spectral weights.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "swl/kernels.hpp"
#include "swl/rng.hpp"

namespace swl {

class RealFft;

struct GridSpec {
  int dim = 1;
  double L = 8.0;       // box side, box is [-L/2, L/2)^d
  std::size_t n = 256;  // points per axis, power of two
  double dt = 1.0 / 256;
  double T = 1.0;

  double dx() const { return L / static_cast<double>(n); }
  std::size_t points() const;
  std::size_t steps() const;  // round(T / dt); validate() checks it is exact
  double coordinate(std::size_t j) const { return -0.5 * L + static_cast<double>(j) * dx(); }
  void validate() const;
};

struct NoiseIncrement {
  GridSpec grid;
  std::vector<double> values;  // density per cell, row-major (last axis fastest)
};

NoiseIncrement sample_white(const GridSpec& grid, const NoiseKey& key);
NoiseIncrement sample_colored(const GridSpec& grid, const KernelSpec& spec, const NoiseKey& key);

// Reusable sampler: holds the FFT plans and per-mode standard deviations.
class NoiseSampler {
 public:
  NoiseSampler(const GridSpec& grid, const KernelSpec& spec);
  ~NoiseSampler();
  NoiseSampler(const NoiseSampler&) = delete;
  NoiseSampler& operator=(const NoiseSampler&) = delete;

  const GridSpec& grid() const { return grid_; }
  const KernelSpec& kernel() const { return spec_; }

  void sample(const NoiseKey& key, std::span<double> out);

  // Exact covariance of the sampled field: entry j is Cov(W(0), W(j dx)) for
  // the lag vector with multi-index j (periodic).
  std::vector<double> covariance() const;

 private:
  GridSpec grid_;
  KernelSpec spec_;
  bool cellwise_white_;
  std::unique_ptr<RealFft> fft_;
  std::vector<double> mode_scale_;     // sqrt(N * variance_k)
  std::vector<double> mode_variance_;  // variance_k
};

struct NoiseDumpHeader {
  int dim = 1;
  std::uint64_t n = 0;
  std::uint64_t steps = 0;
  double L = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t path = 0;
};

// Binary dump: 8-byte magic, header fields, then steps * n^d float64 values.
void write_noise_dump(std::ostream& os, const NoiseDumpHeader& h, std::span<const double> values);
NoiseDumpHeader read_noise_dump(std::istream& is, std::vector<double>& values);

}  // namespace swl
