#pragma once

#ifdef MDOPT_HAVE_OPENMP
#include <omp.h>
#endif

namespace mdopt {

// Replicate and grid loops come in two interchangeable flavours: a plain
// serial reference loop and an OpenMP loop over independent slots. Both
// produce bitwise-identical results because every unit of work derives its
// randomness from (seed, index) and writes only its own slot.
enum class ExecutionPolicy { serial, parallel };

inline int max_threads() {
#ifdef MDOPT_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace mdopt
