#pragma once

#include <cstdint>
#include <limits>

namespace psloc {

enum class StreamPurpose : std::uint64_t {
  Paths = 1,
  Thinning = 2,
  Replication = 3,
  Test = 4,
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for the stream identified by (master, index, sub_index, purpose).
/// Distinct keys give statistically independent streams, so replications can
/// run on any thread without changing results.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t sub_index,
                          StreamPurpose purpose);

/// xoshiro256++ engine; satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

}  // namespace psloc
