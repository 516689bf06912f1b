#pragma once

#include <cstddef>
#include <functional>

namespace qjumps {

// Worker count: QJUMPS_THREADS when set, otherwise hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, n) over a static partition of worker threads.
// The first exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qjumps
