#pragma once

#include <cstddef>
#include <functional>

namespace uled {

/// Worker cap: ULED_INSPECT_THREADS when set to a positive integer, otherwise
/// the number of hardware threads.
std::size_t default_thread_count();

/// Runs body(begin, end) over a static partition of [0, n). Chunks are
/// disjoint, so bodies that only write their own indices give results that do
/// not depend on the thread count. threads == 0 means default_thread_count().
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace uled
