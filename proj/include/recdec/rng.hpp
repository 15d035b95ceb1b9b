#pragma once

#include <cstdint>
#include <random>

namespace recdec {

/**
 * Deterministic random source for synthetic data generation.
 *
 * Wraps std::mt19937_64 (whose output sequence is pinned by the standard)
 * and derives bounded draws without std::uniform_*_distribution, whose
 * results are implementation-defined. Same seed -> same stream everywhere.
 */
class DeterministicRng {
public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform draw in [0, n). Modulo bias is negligible for the small n used
  /// here and keeps the mapping portable.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 engine_;
};

}  // namespace recdec
