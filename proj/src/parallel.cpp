#include "milne/parallel.hpp"

#include <cstdlib>
#include <string>

namespace milne {

int apply_thread_cap() {
#if MILNE_USE_OPENMP
  if (const char* env = std::getenv("MILNE_LAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) omp_set_num_threads(n);
    } catch (...) {
      // ignore malformed values; keep the OpenMP default
    }
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int max_threads() {
#if MILNE_USE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace milne
