#pragma once

#include <cstddef>
#include <functional>

namespace mmcov {

// Worker count from MMCOV_THREADS, else the hardware concurrency (at least 1).
int thread_count();

// Runs fn(i) for i in [0, n) on up to thread_count() threads. Work is split in
// contiguous chunks; callers write results into per-index slots so the outcome
// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mmcov
