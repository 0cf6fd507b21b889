#pragma once

#include <cstddef>
#include <functional>

namespace trisieve {

/// Worker count from TRISIEVE_THREADS, else hardware concurrency (at least 1).
int default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 means
/// default_thread_count()). Tasks are claimed from a shared counter, so the
/// caller must make each task depend only on its index. The first exception
/// thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace trisieve
