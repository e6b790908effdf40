#pragma once

#include <cstddef>

namespace stordual {

/// Worker cap shared by the few places that fan work out (bound searches,
/// batch verification). Reads STORAGE_SOLVER_THREADS; falls back to the
/// hardware concurrency, and never returns 0.
std::size_t worker_limit();

}  // namespace stordual
