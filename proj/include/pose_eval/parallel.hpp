#pragma once

#include <cstddef>
#include <functional>

namespace pose_eval {

/// Hardware concurrency, at least 1.
unsigned default_threads() noexcept;

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Each index runs
/// exactly once; callers write results into slot i, so the outcome does not
/// depend on scheduling. The first exception thrown by fn is rethrown after
/// all workers have stopped.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace pose_eval
