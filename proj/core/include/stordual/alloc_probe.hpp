#pragma once

#include <cstddef>

namespace stordual::alloc_probe {

/// Per-thread heap accounting snapshot taken by the instrumented global
/// allocator. Binaries opt in by linking stordual_allocprobe; without it the
/// counters stay at zero and active() reports false.
struct Stats {
  std::size_t live_bytes = 0;
  std::size_t peak_bytes = 0;
  std::size_t allocations = 0;
  std::size_t frees = 0;
};

/// Zeroes the calling thread's counters (peak resets to the current live size).
void reset();

Stats stats();

bool active();

}  // namespace stordual::alloc_probe
