#pragma once

#include <cstddef>
#include <functional>

namespace janossy {

/// Worker count from JANOSSY_THREADS, else the hardware concurrency.
int default_threads();

/// Calls body(i) for i in [0, count) on up to `threads` workers (0 means the
/// default). Each index runs exactly once; the first exception is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace janossy
