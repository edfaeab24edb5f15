#pragma once

#include <cstddef>
#include <functional>

namespace uwsynth {

/// Number of workers used when a caller passes jobs <= 0.
int default_jobs();

/// Runs fn(0..n-1) on `jobs` worker threads (serial when jobs == 1). Each
/// index is processed exactly once; callers own any output slots, so results
/// are independent of scheduling. The first exception thrown by any worker is
/// rethrown after all workers join.
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& fn);

} // namespace uwsynth
