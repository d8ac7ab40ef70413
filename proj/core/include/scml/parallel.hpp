#pragma once

#include <cstddef>
#include <functional>

namespace scml {

/// Resolves a requested worker count; 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Runs fn(begin, end) over contiguous chunks of [0, n). Chunks are disjoint,
/// so callers writing per-index results get schedule-independent output.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace scml
