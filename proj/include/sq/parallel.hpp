#pragma once

#include <cstddef>
#include <functional>

namespace sq {

/// Worker count for a `--threads` style request: 0 means all hardware threads.
std::size_t resolve_threads(std::size_t requested) noexcept;

/// Calls body(begin, end) over a static partition of [0, count) into at most
/// `threads` contiguous chunks. Chunk boundaries depend only on (count,
/// threads), and the first exception thrown by any chunk is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace sq
