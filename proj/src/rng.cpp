#include "qit/rng.hpp"

#include <cmath>

namespace qit {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform_pos() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) {
  const double u = uniform();
  const double x = lo + (hi - lo) * u;
  // Rounding can land on hi when the interval is tiny.
  return x < hi ? x : lo;
}

std::uint64_t Rng::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return engine_();  // full 64-bit range
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % span);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + x % span;
}

double Rng::exponential() { return -std::log(uniform_pos()); }

}  // namespace qit
