#pragma once

#include <cstddef>
#include <functional>

namespace vrcov {

/// 0 means "one per hardware thread".
unsigned resolve_workers(unsigned requested) noexcept;

/// Calls body(i) for every i in [0, count), distributing indices over up to
/// `workers` threads. The first exception thrown by any body is rethrown.
/// Callers that need worker-independent results must write into per-index
/// slots and reduce them in index order.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace vrcov
