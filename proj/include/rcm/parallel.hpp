#pragma once

#include <cstddef>
#include <functional>

namespace rcm {

// 0 means "all hardware threads".
int resolve_threads(int requested);

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// handled exactly once; callers write results into slot i and reduce
// afterwards in index order, which keeps results thread-count independent.
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace rcm
