#pragma once
// Counter-based random numbers: Philox4x32-10 keyed by the run seed, with the
// counter carrying (cell pair, step, path, stream). Any draw can be recomputed
// independently of evaluation order or thread layout.

#include <array>
#include <cstdint>
#include <utility>

namespace swl {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key);

// Stream tags keep unrelated consumers of the same seed apart.
enum class Stream : std::uint32_t {
  SpaceTimeNoise = 0,
  Bootstrap = 1,
  Synthetic = 2,
  MonteCarlo = 3,
};

struct NoiseKey {
  std::uint64_t seed = 0;
  std::uint32_t path = 0;
  std::uint32_t step = 0;
  Stream stream = Stream::SpaceTimeNoise;
};

// Two independent standard normals for counter slot `slot`.
std::pair<double, double> normal_pair(const NoiseKey& key, std::uint32_t slot);

// Standard normal number `index` of the stream: slot index/2, component index%2.
double normal_at(const NoiseKey& key, std::uint64_t index);

// Four uniforms in [0, 1) (32-bit resolution) for counter slot `slot`.
std::array<double, 4> uniform4(const NoiseKey& key, std::uint32_t slot);

// Sequential generator on top of the counter scheme, for bootstrap and
// synthetic draws where order is fixed by construction.
class CounterRng {
 public:
  explicit CounterRng(NoiseKey key) : key_(key) {}
  double uniform();
  double normal();

 private:
  NoiseKey key_;
  std::uint32_t slot_ = 0;
  std::array<double, 4> ubuf_{};
  int upos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
  std::uint32_t nslot_ = 0x80000000u;
};

}  // namespace swl
