#include "multiport/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace multiport {

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double u1 = uniform01();
  while (u1 == 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

long long Rng::binomial(long long n, double p) {
  if (n < 0) throw std::invalid_argument("Rng::binomial: n must be >= 0");
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;

  const double u = uniform01();
  const double nd = static_cast<double>(n);
  long long mode = static_cast<long long>(std::floor((nd + 1.0) * p));
  mode = std::clamp<long long>(mode, 0, n);

  const double log_fm = std::lgamma(nd + 1.0) - std::lgamma(mode + 1.0) -
                        std::lgamma(nd - mode + 1.0) + mode * std::log(p) +
                        (nd - mode) * std::log1p(-p);
  const double odds = p / (1.0 - p);

  double cum = std::exp(log_fm);
  if (u <= cum) return mode;
  long long lo = mode, hi = mode;
  double f_lo = std::exp(log_fm), f_hi = f_lo;
  while (lo > 0 || hi < n) {
    if (hi < n) {
      f_hi *= odds * static_cast<double>(n - hi) / static_cast<double>(hi + 1);
      ++hi;
      cum += f_hi;
      if (u <= cum) return hi;
    }
    if (lo > 0) {
      f_lo *= static_cast<double>(lo) / (odds * static_cast<double>(n - lo + 1));
      --lo;
      cum += f_lo;
      if (u <= cum) return lo;
    }
  }
  return mode;  // u landed in the rounding slack past both tails
}

std::uint64_t derive_block_seed(std::uint64_t seed, std::uint64_t block_index) {
  // splitmix64 finalizer over (seed, block) so distinct blocks decorrelate.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (block_index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int thread_cap() {
  const char* env = std::getenv("MULTIPORT_TTF_THREADS");
  long v = 0;
  if (env != nullptr && *env != '\0') {
    char* end = nullptr;
    v = std::strtol(env, &end, 10);
    if (end == env || v < 0) v = 0;
  }
  if (v == 0) v = static_cast<long>(std::thread::hardware_concurrency());
  return std::max(1, static_cast<int>(v));
}

void parallel_for_blocks(std::int64_t n_blocks, const std::function<void(std::int64_t)>& fn) {
  if (n_blocks <= 0) return;
  const int workers = std::min<std::int64_t>(thread_cap(), n_blocks);
  if (workers <= 1) {
    for (std::int64_t b = 0; b < n_blocks; ++b) fn(b);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([=, &fn] {
      for (std::int64_t b = w; b < n_blocks; b += workers) fn(b);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace multiport
