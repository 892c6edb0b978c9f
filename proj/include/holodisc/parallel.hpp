#pragma once

#include <cstddef>
#include <functional>

namespace holodisc {

/// Worker count for parallel loops. Defaults to $HOLODISC_THREADS, else 1.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n). Each index is processed exactly once; callers
/// write to per-index slots so results never depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Sums values in a fixed pairwise order (independent of threading).
double pairwise_sum(const double* values, std::size_t n);

} // namespace holodisc
