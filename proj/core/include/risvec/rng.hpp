#pragma once

#include <cstdint>
#include <random>

namespace risvec {

using Rng = std::mt19937_64;

// Named sub-streams split off the master seed. Each consumer owns its own
// generator so toggling one component never shifts another's draws.
enum class Stream : std::uint64_t {
  kArrivals = 1,
  kFading = 2,
  kMobility = 3,
  kInit = 4,
  kExploration = 5,
  kReplay = 6,
  kPhase = 7,
  kPowerHeuristic = 8,
};

// SplitMix64 finalizer applied to (master, stream, salt). Counter based, so
// the derived seeds do not depend on the order in which streams are created.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream,
                                   std::uint64_t salt = 0) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1) +
                    0xD1B54A32D192ED03ULL * salt;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t salt = 0) {
  return Rng(split_seed(master, static_cast<std::uint64_t>(stream), salt));
}

}  // namespace risvec
