#pragma once

#include <cstddef>
#include <functional>

namespace vulnaudit {

/// Worker count: VULNAUDIT_THREADS if set and positive, otherwise the
/// hardware concurrency (0 or unset means auto).
std::size_t thread_count();

/// Splits [0, n) into contiguous chunks and runs `body(begin, end, worker)`
/// on up to thread_count() threads. Rethrows the first worker exception.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace vulnaudit
