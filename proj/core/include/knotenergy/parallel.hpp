#pragma once

#include <cstddef>
#include <functional>

namespace knotenergy {

/// Resolve a user thread cap: 0 means "hardware concurrency", never less than 1.
unsigned resolve_threads(unsigned requested) noexcept;

/// Runs body(row) for every row in [0, rows), split into contiguous blocks, one per thread.
///
/// Block b covers rows [b*rows/T, (b+1)*rows/T). Callers write per-row results into
/// preallocated storage and reduce them in row order afterwards, so results do not
/// depend on the thread count. The first exception thrown by any block is rethrown.
void parallel_rows(std::size_t rows, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace knotenergy
