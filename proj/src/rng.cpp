#include "psloc/rng.hpp"

#include <initializer_list>

namespace psloc {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t sub_index,
                          StreamPurpose purpose) {
  // Absorb each key component through a splitmix64 round so nearby keys land
  // on unrelated seeds.
  std::uint64_t state = master;
  std::uint64_t h = splitmix64(state);
  for (std::uint64_t part : {index, sub_index, static_cast<std::uint64_t>(purpose)}) {
    state = h ^ (part * 0xD1B54A32D192ED03ULL);
    h = splitmix64(state);
  }
  return h;
}

Stream::Stream(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

}  // namespace psloc
