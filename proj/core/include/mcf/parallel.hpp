#pragma once

#include <cstddef>
#include <functional>

namespace mcf {

// Thread cap: MCF_THREADS if set and positive, else hardware concurrency.
int thread_count();

// Calls fn(begin, end) over disjoint chunks of [0, n). Small ranges run inline.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t min_chunk = 4096);

}  // namespace mcf
