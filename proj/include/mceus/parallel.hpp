#pragma once

#include <cstddef>
#include <functional>

namespace mceus {

/// Worker count: MCEUS_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (0 or unset means auto).
unsigned worker_count();

/// Runs fn(i) for every i in [begin, end) split into contiguous chunks across
/// worker threads. Each index is visited exactly once; callers write only to
/// index-owned output so the result does not depend on the schedule.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace mceus
