#pragma once

#include <cstddef>
#include <functional>

namespace semiflow {

/// Number of worker threads used by parallel_for (at least 1). Defaults to 1.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n). Each index is processed exactly once; results
/// must be written to per-index slots so the outcome does not depend on the
/// schedule. If several bodies throw, the exception of the smallest index is
/// rethrown after all workers have joined.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace semiflow
