#pragma once

#include <cstddef>
#include <functional>

namespace wbary {

// Worker budget for independent OT solves: WBARY_THREADS when set and
// positive, otherwise the number of logical cores.
int thread_budget();

// Runs fn(i) for every i in [0, count), on up to thread_budget() workers.
// Callers store results into preallocated per-index slots, so the outcome
// does not depend on scheduling. The first exception thrown by any task is
// rethrown on the calling thread after all workers have joined.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace wbary
