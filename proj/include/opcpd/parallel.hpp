#pragma once

#include <cstddef>
#include <functional>

namespace opcpd {

// Worker count: OP_CPD_THREADS when set to a positive integer, otherwise
// std::thread::hardware_concurrency() (at least 1).
std::size_t thread_count();

// Calls body(i) for every i in [0, n) across up to `threads` workers
// (0 = thread_count()). Work items must be independent. The first
// exception thrown (lowest index) is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

} // namespace opcpd
