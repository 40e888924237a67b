#pragma once

#include <cstddef>
#include <functional>

namespace mismatchlab {

/// Worker cap: MISMATCHLAB_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 means
/// worker_count()). Work items must write to disjoint outputs; results are
/// therefore independent of scheduling. The first exception thrown by any
/// item is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, std::size_t workers = 0);

}  // namespace mismatchlab
