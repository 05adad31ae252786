#pragma once

#include <cstddef>
#include <functional>

namespace ameans {

/// Worker count: ASYMPTOTIC_MEANS_THREADS caps it, 0 or unset means auto.
int thread_count();

/// Runs fn(i) for i in [0, n). Results must be written to per-index slots;
/// the chunking is static so output is identical regardless of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ameans
