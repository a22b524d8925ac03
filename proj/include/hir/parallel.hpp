#pragma once

#include <cstddef>
#include <functional>

namespace hir {

/// HIR_NUM_WORKERS if set and positive, else `configured` if positive, else
/// the number of logical cores.
std::size_t worker_count(std::size_t configured = 0);

/// Runs body(i) for i in [0, n) on at most `workers` threads. The first
/// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace hir
