#pragma once

#include <cstdint>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mismc {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline bool built_with_openmp() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

// Runs fn(i) for i in [0, n). Iterations must be independent and may write
// only to per-index slots; any reduction over the slots happens after the
// loop, in index order, so results do not depend on thread count or
// scheduling. Nested calls degrade to serial execution (OpenMP keeps one
// active parallel level), which is the intended behaviour when an estimator
// runs inside a parallel experiment farm.
template <typename F>
void parallel_for(std::int64_t n, F&& fn) {
  std::exception_ptr err;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(mismc_parallel_for_err)
      {
        if (!err) err = std::current_exception();
      }
    }
  }
#else
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      if (!err) err = std::current_exception();
    }
  }
#endif
  if (err) std::rethrow_exception(err);
}

}  // namespace mismc
