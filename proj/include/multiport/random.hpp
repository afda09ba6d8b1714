#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace multiport {

/// Deterministic generator with platform-stable uniform, normal and binomial
/// draws. All variates are derived from the raw 64-bit stream through fixed
/// arithmetic (no implementation-defined std:: distributions), so a seed
/// pins the byte-exact output everywhere we build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; draws two uniforms per pair.
  double normal();

  /// Exact Binomial(n, p) by inverse-CDF accumulation outward from the mode;
  /// O(sqrt(n p (1-p))) expected steps.
  long long binomial(long long n, double p);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// Stateless mix used to derive independent per-block seeds from one master
/// seed; block streams do not depend on how blocks are assigned to workers.
std::uint64_t derive_block_seed(std::uint64_t seed, std::uint64_t block_index);

/// Worker cap from MULTIPORT_TTF_THREADS (0 or unset = hardware concurrency).
int thread_cap();

/// Runs fn(block) for block = 0..n_blocks-1, distributing blocks over at most
/// thread_cap() workers. Callers own any per-block output slots; combine them
/// in block order afterwards for reproducible reductions.
void parallel_for_blocks(std::int64_t n_blocks, const std::function<void(std::int64_t)>& fn);

}  // namespace multiport
