#pragma once

#include <atomic>
#include <cstdint>

#include "smallnoise/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smallnoise {

/// Execution policy for the data-parallel kernels. `serial` is the plain-loop
/// reference; `parallel` runs the same body under OpenMP. Results must be
/// bit-identical between the two because every iteration owns its output slots
/// and all randomness is counter-based.
enum class Exec { serial, parallel };

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

template <class Body>
void parallel_for(std::int64_t n, Exec exec, Body&& body) {
  if (exec == Exec::parallel) {
    std::atomic<bool> failed{false};
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
      if (failed.load(std::memory_order_relaxed)) continue;
      try {
        body(i);
      } catch (...) {
        failed.store(true, std::memory_order_relaxed);
      }
    }
    if (failed.load())
      throw NumericError("kernel iteration threw inside a parallel region");
  } else {
    for (std::int64_t i = 0; i < n; ++i) body(i);
  }
}

}  // namespace smallnoise
