#pragma once

#include <cstddef>
#include <functional>

namespace maeb {

// Worker count: MAEB_SIM_THREADS when set (at most 256), otherwise the
// hardware concurrency.
std::size_t worker_count();

// Runs fn(i) for i in [0, n). Each index must write only its own output slot;
// results are then independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace maeb
