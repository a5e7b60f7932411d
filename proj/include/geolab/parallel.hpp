#pragma once

// Deterministic work distribution: each index computes into its own slot, so
// results are identical no matter how many workers run. Reductions happen
// afterwards in index order. This is what makes artifacts byte-stable across
// --workers settings.

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace geolab {

// Process-wide worker count, set once by the CLI (or tests). 0 = hardware.
void set_worker_count(unsigned n);
unsigned worker_count();

// Runs fn(i) for i in [0, n). fn must only write to state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Convenience: fills a vector with fn(i), slot per index.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace geolab
