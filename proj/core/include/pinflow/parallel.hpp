#pragma once

/// @file parallel.hpp
/// @brief Deterministic static-chunk parallel loops

#include <cstddef>
#include <functional>

namespace pinflow {

/// Worker count used by parallel_for; defaults to PINFLOW_THREADS or 1
int thread_count();
/// Overrides the worker count for the calling process (values < 1 mean 1)
void set_thread_count(int n);

/// Runs body(begin, end) over contiguous chunks of [0, n)
///
/// Chunks are disjoint, so any body that writes only to its own indices
/// produces results independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace pinflow
