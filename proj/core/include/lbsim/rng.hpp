#pragma once

#include <cstdint>
#include <random>

namespace lbsim::rng {

// splitmix64 finalizer; used for seed derivation only, never as the
// simulation engine itself.
constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Named sub-streams derived from one master seed, so workload generation,
// prediction noise, stochastic policies and evolution can be varied
// independently while staying reproducible.
enum class Stream : uint64_t {
  kWorkload = 1,
  kNoise = 2,
  kPolicy = 3,
  kEvolution = 4,
  kInit = 5,
};

constexpr uint64_t derive(uint64_t master, Stream stream, uint64_t index = 0) {
  const uint64_t h =
      splitmix64(master ^ (static_cast<uint64_t>(stream) * 0xA24BAED4963EE407ull));
  return splitmix64(h ^ (index * 0x9FB21C651E98DF25ull));
}

inline std::mt19937_64 engine(uint64_t seed) { return std::mt19937_64{seed}; }

}  // namespace lbsim::rng
