#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace adaptista {

/// Identifies an independent random stream: the same (seed, label) pair
/// always produces the same draws.
struct RngSpec {
  std::uint64_t seed = 0;
  std::string label;

  /// Child stream, e.g. RngSpec{7, "dict"}.derive("samples").
  RngSpec derive(const std::string& sub_label) const {
    return RngSpec{seed, label + "/" + sub_label};
  }
};

/// xoshiro256** (Blackman and Vigna), state filled from a splitmix64 stream
/// started at seed ^ fnv1a(label).
/// Distributions are implemented here instead of using <random>'s, whose
/// algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(const RngSpec& spec);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via the Marsaglia polar method.
  double normal();

  /// Uniform integer in [0, n), unbiased.
  std::uint64_t below(std::uint64_t n);

  /// k distinct indices drawn uniformly from [0, n), in draw order
  /// (partial Fisher-Yates).
  std::vector<std::int64_t> sample_without_replacement(std::int64_t n,
                                                       std::int64_t k);

 private:
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace adaptista
