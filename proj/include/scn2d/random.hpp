#pragma once

// Seeding and scheduling helpers. Every stochastic quantity in the library is
// drawn from a child stream keyed by (master seed, indices...), so results do
// not depend on evaluation order or thread count.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <initializer_list>
#include <random>
#include <thread>
#include <vector>

namespace scn2d {

using Rng = std::mt19937_64;

namespace detail {
// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Seed for the child stream identified by `path` under `master`.
constexpr std::uint64_t child_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = detail::mix64(master);
  for (std::uint64_t p : path) s = detail::mix64(s ^ detail::mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng child_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(child_seed(master, path));
}

/// Runs body(i) for i in [0, n) on up to `threads` workers. Static block
/// partition; the first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace scn2d
