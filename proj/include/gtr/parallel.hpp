#pragma once

#include <cstdint>
#include <functional>

namespace gtr {

/// Worker budget: the GTR_THREADS environment variable when set (>= 1),
/// otherwise the hardware default.
int effective_threads();

/// Splits [0, n_items) into fixed chunks and calls fn(chunk_index, begin, end)
/// for each, possibly from several workers. Chunk boundaries depend only on
/// (n_items, chunk_size), so per-chunk results are reproducible regardless of
/// the worker count.
void for_each_chunk(std::uint64_t n_items, std::uint64_t chunk_size,
                    const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn);

}  // namespace gtr
