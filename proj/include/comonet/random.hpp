#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace comonet {

/// Seeded pseudo-random stream.
///
/// The generator is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. The mappings to integers and reals are implemented here
/// rather than with <random> distributions so the draws are identical on every
/// standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : seed_(seed), gen_(seed) {}

  /// Independent stream for a named consumer. Adding consumers never perturbs
  /// the draws of existing ones.
  static RandomStream derive(std::uint64_t master_seed, std::string_view consumer);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi] (inclusive), unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// True with probability p. Always consumes exactly one draw.
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace comonet
