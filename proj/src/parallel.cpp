#include "csx/parallel.hpp"

#include <omp.h>

namespace csx {

namespace {
int g_threads = 0;
}

void set_thread_count(int threads) {
  g_threads = threads > 0 ? threads : 0;
  if (g_threads > 0) omp_set_num_threads(g_threads);
}

int thread_count() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

}  // namespace csx
