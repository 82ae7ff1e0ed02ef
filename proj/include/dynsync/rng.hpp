#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>

namespace dynsync {

// SplitMix64 finalizer; used to fold stream tags into seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed of the substream reached from `seed` by following `tags` in order.
// Substreams are keyed, not sequential: the seed for (trial 7, step 3) does
// not depend on how many numbers trials 0..6 consumed.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

// Stream tags used by the generators. Stable across releases.
namespace stream {
inline constexpr std::uint64_t kTruth = 0x7472757468ULL;       // "truth"
inline constexpr std::uint64_t kGraph = 0x6772617068ULL;       // "graph"
inline constexpr std::uint64_t kRepair = 0x726570616972ULL;    // "repair"
inline constexpr std::uint64_t kNoise = 0x6e6f697365ULL;       // "noise"
inline constexpr std::uint64_t kTrial = 0x747269616cULL;       // "trial"
inline constexpr std::uint64_t kHoldout = 0x686f6c646f7574ULL; // "holdout"
inline constexpr std::uint64_t kBtl = 0x62746cULL;             // "btl"
}  // namespace stream

// mt19937_64 (output sequence fixed by the C++ standard) plus distribution
// code implemented here, so draws do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    return Rng(derive_seed(seed, tags));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, bound).
  std::uint64_t uniform_index(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal (Marsaglia polar method, spare value cached).
  double normal();

  int binomial(int trials, double p);

  template <class It>
  void shuffle(It first, It last) {
    const auto count = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = count; i > 1; --i) {
      const auto j = uniform_index(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dynsync
