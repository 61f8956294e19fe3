#pragma once

#include <cstddef>
#include <functional>

namespace jamlab {

// Worker count: JAMLAB_THREADS when set (>= 1), else hardware concurrency.
unsigned worker_threads();

// Runs body(i) for i in [0, n) on up to worker_threads() threads. Work is
// partitioned statically; body must not depend on execution order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace jamlab
