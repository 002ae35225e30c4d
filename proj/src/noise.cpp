#include "swl/noise.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "swl/fft.hpp"

namespace swl {
namespace {

constexpr char kNoiseMagic[8] = {'S', 'W', 'L', 'N', 'O', 'I', 'S', 'E'};
constexpr std::uint32_t kDumpVersion = 1;
constexpr std::uint32_t kFloat64 = 1;

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("noise dump: truncated header");
  return v;
}

}  // namespace

std::size_t GridSpec::points() const {
  std::size_t p = 1;
  for (int i = 0; i < dim; ++i) p *= n;
  return p;
}

std::size_t GridSpec::steps() const { return static_cast<std::size_t>(std::llround(T / dt)); }

void GridSpec::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid: dimension must be 1, 2 or 3");
  if (n < 4 || (n & (n - 1)) != 0) throw std::invalid_argument(fmt::format("grid: n={} is not a power of two >= 4", n));
  if (!(L > 0.0)) throw std::invalid_argument("grid: L must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("grid: dt must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("grid: T must be positive");
  const double k = T / dt;
  if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k))
    throw std::invalid_argument(fmt::format("grid: T={} is not a whole number of steps dt={}", T, dt));
}

NoiseSampler::NoiseSampler(const GridSpec& grid, const KernelSpec& spec)
    : grid_(grid), spec_(spec), cellwise_white_(spec.family == KernelFamily::WhiteNoise) {
  grid_.validate();
  if (spec.dim != grid.dim) throw std::invalid_argument("noise: kernel and grid dimensions differ");
  fft_ = std::make_unique<RealFft>(grid.dim, grid.n);
  const std::size_t ns = fft_->spectral_size();
  mode_variance_.resize(ns);
  mode_scale_.resize(ns);
  const double norm = grid.dt * std::pow(2.0 * std::numbers::pi, -grid.dim);
  const double count = static_cast<double>(grid.points());
  int k[3];
  for (std::size_t i = 0; i < ns; ++i) {
    fft_->wavenumbers(i, k);
    mode_variance_[i] = norm * spectral_cell_mass(spec, {k, static_cast<std::size_t>(grid.dim)}, grid.L);
    mode_scale_[i] = std::sqrt(count * mode_variance_[i]);
  }
}

NoiseSampler::~NoiseSampler() = default;

void NoiseSampler::sample(const NoiseKey& key, std::span<double> out) {
  const std::size_t N = grid_.points();
  if (out.size() != N) throw std::invalid_argument("noise: output size mismatch");
  if (cellwise_white_) {
    const double sd = std::sqrt(grid_.dt / grid_.dx());
    const std::int64_t half = static_cast<std::int64_t>(grid_.n / 2);
    for (std::size_t j = 0; j < N; ++j) {
      // Signed offset from the origin cell, shifted into the unsigned range.
      const std::int64_t g = static_cast<std::int64_t>(j) - half;
      const auto u = static_cast<std::uint64_t>(g + (std::int64_t{1} << 31));
      out[j] = sd * normal_at(key, u);
    }
    return;
  }
  auto re = fft_->real();
  for (std::size_t j = 0; j < N; j += 2) {
    const auto [a, b] = normal_pair(key, static_cast<std::uint32_t>(j / 2));
    re[j] = a;
    if (j + 1 < N) re[j + 1] = b;
  }
  fft_->forward();
  auto sp = fft_->spectrum();
  for (std::size_t i = 0; i < sp.size(); ++i) sp[i] *= mode_scale_[i];
  fft_->backward();
  const double inv = 1.0 / static_cast<double>(N);
  for (std::size_t j = 0; j < N; ++j) out[j] = re[j] * inv;
}

std::vector<double> NoiseSampler::covariance() const {
  const std::size_t N = grid_.points();
  if (cellwise_white_) {
    std::vector<double> c(N, 0.0);
    c[0] = grid_.dt / grid_.dx();
    return c;
  }
  RealFft fft(grid_.dim, grid_.n);
  auto sp = fft.spectrum();
  for (std::size_t i = 0; i < sp.size(); ++i) sp[i] = mode_variance_[i];
  fft.backward();
  auto re = fft.real();
  return {re.begin(), re.end()};
}

NoiseIncrement sample_white(const GridSpec& grid, const NoiseKey& key) {
  if (grid.dim != 1) throw std::invalid_argument("noise: white noise is only defined for d = 1");
  NoiseSampler s(grid, KernelSpec::white_noise());
  NoiseIncrement inc{grid, std::vector<double>(grid.points())};
  s.sample(key, inc.values);
  return inc;
}

NoiseIncrement sample_colored(const GridSpec& grid, const KernelSpec& spec, const NoiseKey& key) {
  if (spec.family == KernelFamily::WhiteNoise)
    throw std::invalid_argument("noise: use sample_white for the white-noise kernel");
  NoiseSampler s(grid, spec);
  NoiseIncrement inc{grid, std::vector<double>(grid.points())};
  s.sample(key, inc.values);
  return inc;
}

void write_noise_dump(std::ostream& os, const NoiseDumpHeader& h, std::span<const double> values) {
  std::uint64_t per = 1;
  for (int i = 0; i < h.dim; ++i) per *= h.n;
  if (values.size() != per * h.steps) throw std::invalid_argument("noise dump: value count mismatch");
  os.write(kNoiseMagic, sizeof(kNoiseMagic));
  put(os, kDumpVersion);
  put(os, static_cast<std::uint32_t>(h.dim));
  put(os, h.n);
  put(os, h.steps);
  put(os, h.L);
  put(os, h.dt);
  put(os, kFloat64);
  put(os, h.seed);
  put(os, h.path);
  os.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
}

NoiseDumpHeader read_noise_dump(std::istream& is, std::vector<double>& values) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kNoiseMagic, sizeof(magic)) != 0) throw std::runtime_error("noise dump: bad magic");
  if (get<std::uint32_t>(is) != kDumpVersion) throw std::runtime_error("noise dump: unsupported version");
  NoiseDumpHeader h;
  h.dim = static_cast<int>(get<std::uint32_t>(is));
  h.n = get<std::uint64_t>(is);
  h.steps = get<std::uint64_t>(is);
  h.L = get<double>(is);
  h.dt = get<double>(is);
  if (get<std::uint32_t>(is) != kFloat64) throw std::runtime_error("noise dump: unsupported dtype");
  h.seed = get<std::uint64_t>(is);
  h.path = get<std::uint32_t>(is);
  std::uint64_t per = 1;
  for (int i = 0; i < h.dim; ++i) per *= h.n;
  values.resize(per * h.steps);
  is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("noise dump: truncated data");
  return h;
}

}  // namespace swl
