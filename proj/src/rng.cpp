#include "swl/rng.hpp"

#include <cmath>
#include <numbers>

namespace swl {
namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline PhiloxBlock round(const PhiloxBlock& c, const PhiloxKey& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kM0, c[0], hi0, lo0);
  mulhilo(kM1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

PhiloxBlock block_for(const NoiseKey& key, std::uint32_t slot) {
  const PhiloxKey k{static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32)};
  return philox4x32_10({slot, key.step, key.path, static_cast<std::uint32_t>(key.stream)}, k);
}

}  // namespace

PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    counter = round(counter, key);
  }
  return counter;
}

std::pair<double, double> normal_pair(const NoiseKey& key, std::uint32_t slot) {
  const PhiloxBlock b = block_for(key, slot);
  constexpr double kTwo53 = 1.0 / 9007199254740992.0;
  const std::uint64_t a = ((static_cast<std::uint64_t>(b[0]) << 32) | b[1]) >> 11;
  const std::uint64_t c = ((static_cast<std::uint64_t>(b[2]) << 32) | b[3]) >> 11;
  const double u1 = (static_cast<double>(a) + 1.0) * kTwo53;  // (0, 1]
  const double u2 = static_cast<double>(c) * kTwo53;          // [0, 1)
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

double normal_at(const NoiseKey& key, std::uint64_t index) {
  const auto [z0, z1] = normal_pair(key, static_cast<std::uint32_t>(index >> 1));
  return (index & 1u) ? z1 : z0;
}

std::array<double, 4> uniform4(const NoiseKey& key, std::uint32_t slot) {
  const PhiloxBlock b = block_for(key, slot);
  constexpr double kTwo32 = 1.0 / 4294967296.0;
  return {b[0] * kTwo32, b[1] * kTwo32, b[2] * kTwo32, b[3] * kTwo32};
}

double CounterRng::uniform() {
  if (upos_ == 4) {
    ubuf_ = uniform4(key_, slot_++);
    upos_ = 0;
  }
  return ubuf_[upos_++];
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const auto [z0, z1] = normal_pair(key_, nslot_++);
  spare_ = z1;
  has_spare_ = true;
  return z0;
}

}  // namespace swl
