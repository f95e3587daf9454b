#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace conjvi {

// Process-wide cap on worker threads. Initialized from the CONJVI_THREADS
// environment variable (0 or unset means hardware concurrency).
unsigned max_threads();
void set_max_threads(unsigned n);

// Runs f(i) for i in [0, n). Splits the range into contiguous blocks when the
// workload is large enough; `grain` is the minimum number of items per thread.
// Callers only get concurrency when every f(i) writes to its own slot.
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& block_fn);

template <typename F>
void parallel_for_each(std::size_t n, std::size_t grain, F&& f) {
  parallel_for(n, grain, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) f(i);
  });
}

// SplitMix64: cheap deterministic stream derivation for per-trajectory RNGs.
std::uint64_t splitmix64(std::uint64_t& state);

// Counter-based deterministic RNG: each (seed, stream) pair yields an
// independent reproducible sequence regardless of platform or thread count.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 bits of mantissa.
  double next_double();
  // Uniform in [lo, hi).
  double next_in(double lo, double hi);
  // Index into a pmf given as cumulative weights (last entry = total).
  std::size_t next_index(std::span<const double> cumulative);

 private:
  std::uint64_t state_;
};

// Least-squares slope of log(y) against log(x). Used for complexity fits.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace conjvi
