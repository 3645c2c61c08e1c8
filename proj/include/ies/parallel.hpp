#pragma once

#include <cstddef>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace ies::parallel {

/// Process-wide worker count for the OpenMP kernel paths. 1 selects the serial
/// reference implementations and is the default: single-worker runs are the
/// only ones with a byte-identical reproducibility guarantee.
int num_threads();
void set_num_threads(int n);

bool openmp_enabled();

/// Grain-size guard: loops shorter than this never fan out.
constexpr std::size_t kMinParallelWork = 4096;

template <typename F>
void parallel_for(std::size_t n, F&& body) {
#if defined(_OPENMP)
  if (num_threads() > 1 && n >= kMinParallelWork) {
#pragma omp parallel for schedule(static) num_threads(num_threads())
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      body(static_cast<std::size_t>(i));
    }
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace ies::parallel
