#pragma once

#include <cstddef>
#include <functional>

namespace fluidlob {

/// Worker cap: FLUIDLOB_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t max_threads();

/// Calls body(k) for k in [0, count) on up to max_threads() workers. Each
/// index runs exactly once; results must be written to per-index slots.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fluidlob
