#pragma once

// Counter-based random streams.
//
// Every random quantity in the library is a pure function of
// (master seed, stream id, counter). Streams never share state, so work can be
// partitioned across threads in any way without changing results.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace graphon_rds {

/// Philox4x32-10 block function (Salmon et al., Random123).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// SplitMix64 finalizer; used only to derive stream identifiers.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s,
                                std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Identifies one independent random stream.
struct RngKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  [[nodiscard]] constexpr RngKey child(std::uint64_t tag) const {
    return {seed, mix64(stream ^ mix64(tag + 0x632BE59BD9B4E019ull))};
  }
  [[nodiscard]] constexpr RngKey child(std::string_view tag) const {
    return child(fnv1a64(tag));
  }
  friend constexpr bool operator==(const RngKey&, const RngKey&) = default;
};

/// Two 64-bit words addressed by (key, block index).
inline std::array<std::uint64_t, 2> counter_block(const RngKey& key, std::uint64_t block) {
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
       static_cast<std::uint32_t>(key.stream), static_cast<std::uint32_t>(key.stream >> 32)},
      {static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32)});
  return {(std::uint64_t{out[1]} << 32) | out[0], (std::uint64_t{out[3]} << 32) | out[2]};
}

/// Uniform on [0,1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// The 64-bit word at position `index` of the stream identified by `key`.
inline std::uint64_t counter_bits(const RngKey& key, std::uint64_t index) {
  return counter_block(key, index >> 1)[index & 1];
}

inline double counter_uniform(const RngKey& key, std::uint64_t index) {
  return to_unit(counter_bits(key, index));
}

/// Sequential view of a counter-based stream. Satisfies
/// UniformRandomBitGenerator.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  explicit CounterStream(RngKey key, std::uint64_t start = 0) : key_(key), next_(start) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if ((next_ & 1) == 0 || !cached_) {
      buffer_ = counter_block(key_, next_ >> 1);
      cached_ = true;
    }
    const auto v = buffer_[next_ & 1];
    ++next_;
    if ((next_ & 1) == 0) cached_ = false;
    return v;
  }

  /// Uniform on [0,1).
  double uniform() { return to_unit((*this)()); }

  /// Uniform on (0,1]; safe for logarithms.
  double uniform_pos() { return 1.0 - uniform(); }

  double exponential(double rate = 1.0) { return -std::log(uniform_pos()) / rate; }

  /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound) {
    __extension__ using u128 = unsigned __int128;
    u128 m = static_cast<u128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<u128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  [[nodiscard]] const RngKey& key() const { return key_; }
  [[nodiscard]] std::uint64_t position() const { return next_; }

 private:
  RngKey key_;
  std::uint64_t next_;
  std::array<std::uint64_t, 2> buffer_{};
  bool cached_ = false;
};

}  // namespace graphon_rds
