#pragma once

#include <cstdint>
#include <random>

namespace qit {

/// Seeded generator with independent sub-streams.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Its seed is a splitmix64 mix of (seed, stream). Draws are built
/// from raw engine output rather than std:: distributions, because those are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Generator for sub-stream `id` of this generator's seed.
  Rng substream(std::uint64_t id) const { return Rng(seed_, id); }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_pos();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer on [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  /// Unit-rate exponential.
  double exponential();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace qit
