#pragma once

#include <cstdint>
#include <initializer_list>

namespace qoc {

// SplitMix64 finalizer; the basis of all seeded randomness here. Chosen so
// that per-experiment sub-streams can be derived from labels alone, making
// results independent of evaluation order.
std::uint64_t mix64(std::uint64_t x);

// Folds an ordered list of labels (seed, counters, indices...) into one
// sub-seed. Not cryptographic; collision-resistant enough for noise streams.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

// Purpose tags used when deriving sub-seeds.
inline constexpr std::uint64_t kSeedFitness = 1;
inline constexpr std::uint64_t kSeedGradient = 2;
inline constexpr std::uint64_t kSeedInitPulse = 3;

// Minimal deterministic generator over a SplitMix64 stream.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double uniform01();          // [0, 1)
  double normal();             // N(0,1) via Box-Muller; two uniforms per draw
  int pm_one(double p_plus);   // +1 with probability p_plus, else -1

 private:
  std::uint64_t state_;
};

}  // namespace qoc
