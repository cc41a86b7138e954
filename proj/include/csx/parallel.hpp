#pragma once

#include <cstddef>
#include <cstdint>

namespace csx {

// Thread count used by the compute kernels. 0 means the OpenMP default.
void set_thread_count(int threads);
int thread_count();

// Runs body(i) for i in [0, n). Iterations must be independent; any
// reduction has to go through per-iteration slots that the caller sums in
// index order afterwards so that results do not depend on the thread count.
template <typename Body>
void parallel_for(std::int64_t n, Body&& body) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace csx
