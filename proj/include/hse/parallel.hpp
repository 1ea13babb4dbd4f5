#pragma once

#include <cstddef>
#include <functional>

namespace hse {

// Worker count: HSE_THREADS if set and positive, else hardware concurrency.
std::size_t default_worker_count();

// Runs body(i) for i in [0, n) on up to `workers` threads. Exceptions from
// the body are rethrown (first by index) after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t workers = 0);

}  // namespace hse
