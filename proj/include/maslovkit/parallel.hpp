#pragma once

#include <cstddef>
#include <functional>

namespace maslovkit {

/// Worker count: hardware concurrency, capped by MASLOV_KIT_THREADS when set.
int thread_count();

/// Calls body(i) for i in [0, count) on up to thread_count() threads.  Each
/// index is visited exactly once; the first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace maslovkit
