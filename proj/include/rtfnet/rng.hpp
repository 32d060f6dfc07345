#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

namespace rtfnet {

/// Seeded pseudo-random source. Conversions from raw 64-bit draws to
/// floating point and bounded integers are done here rather than through
/// <random> distributions so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0. Rejection sampling, no modulo bias.
  std::size_t index(std::size_t n);

  std::string state() const;
  void set_state(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 mix of (base, stream): independent per-record/per-trial seeds
// that do not depend on execution order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace rtfnet
