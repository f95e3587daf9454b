#include "conjvi/util.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace conjvi {

namespace {

unsigned initial_thread_cap() {
  if (const char* env = std::getenv("CONJVI_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::atomic<unsigned>& thread_cap() {
  static std::atomic<unsigned> cap{initial_thread_cap()};
  return cap;
}

}  // namespace

unsigned max_threads() { return thread_cap().load(std::memory_order_relaxed); }

void set_max_threads(unsigned n) {
  thread_cap().store(n == 0 ? 1 : n, std::memory_order_relaxed);
}

void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& block_fn) {
  if (n == 0) return;
  if (grain == 0) grain = 1;
  const std::size_t want = n / grain;
  const std::size_t workers = std::min<std::size_t>(max_threads(), want);
  if (workers <= 1) {
    block_fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&block_fn, begin, end] { block_fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  // Mix the pair so that nearby (seed, stream) values give unrelated streams.
  std::uint64_t s = seed;
  splitmix64(s);
  s ^= 0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL;
  splitmix64(s);
  state_ = s;
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_in(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

std::size_t Rng::next_index(std::span<const double> cumulative) {
  if (cumulative.empty()) throw std::invalid_argument("next_index: empty pmf");
  const double total = cumulative.back();
  const double draw = next_double() * total;
  for (std::size_t i = 0; i + 1 < cumulative.size(); ++i) {
    if (draw < cumulative[i]) return i;
  }
  return cumulative.size() - 1;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope: need >= 2 matching samples");
  }
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace conjvi
