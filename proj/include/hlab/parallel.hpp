#pragma once

#include <cstddef>
#include <functional>

#include "hlab/core.hpp"

namespace hlab {

/// Global worker count (1 = serial). Set once at startup from the CLI.
void set_thread_count(int n);
int thread_count();

/// Runs fn(begin, end) over a fixed partition of [0, n) into chunks whose
/// boundaries depend only on n, never on the worker count, so results that
/// are written per-index are identical for any thread count.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn);

/// Deterministic parallel reduction: per-chunk pairwise sums combined in
/// fixed chunk order. Bit-identical across thread counts.
double parallel_sum(std::size_t n,
                    const std::function<double(std::size_t)>& term);

}  // namespace hlab
