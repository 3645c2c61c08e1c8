#include "ies/parallel.hpp"

#include <atomic>

namespace ies::parallel {

namespace {
std::atomic<int> g_threads{1};
}

int num_threads() { return g_threads.load(std::memory_order_relaxed); }

void set_num_threads(int n) {
  if (n < 1) n = 1;
#if !defined(_OPENMP)
  n = 1;
#endif
  g_threads.store(n, std::memory_order_relaxed);
}

bool openmp_enabled() {
#if defined(_OPENMP)
  return true;
#else
  return false;
#endif
}

}  // namespace ies::parallel
