#pragma once

#include <cstddef>
#include <functional>

namespace hilfer {

/// Execution options shared by the solvers. Results never depend on `threads`.
struct SolveOptions {
    unsigned threads = 1;
};

/// Calls body(i) for i in [0, count) on up to `threads` worker threads. Each index is
/// handled exactly once; the first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace hilfer
