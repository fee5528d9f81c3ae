#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace nullkit {

/// Worker count for grid evaluations. 0 selects NULLKIT_THREADS or, failing
/// that, the hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs fn(0..n-1) on the worker pool. Results must be written by index; the
/// exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Per-item seed derived from a task seed, independent of scheduling.
std::uint64_t item_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace nullkit
