#pragma once

#include <cstddef>
#include <functional>

namespace geoflow {

/// Worker count from GEOFLOW_THREADS; unset, empty or 0 means hardware concurrency.
std::size_t worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. Each index runs exactly
/// once; when several bodies throw, the exception of the smallest index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace geoflow
