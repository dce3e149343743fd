#pragma once

#include <cstddef>
#include <functional>

namespace redex {

/// Worker cap: REDEX_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int thread_cap();

/// Runs body(i) for i in [0, n). Each index is handled exactly once; callers
/// write results into per-index slots so the outcome does not depend on
/// scheduling. Exceptions from body are rethrown (the lowest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace redex
