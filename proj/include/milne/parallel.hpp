#pragma once
// Serial / OpenMP execution switch and the MILNE_LAB_THREADS cap.

#if MILNE_USE_OPENMP
#include <omp.h>
#define MILNE_OMP_STATIC_LOOP _Pragma("omp parallel for schedule(static)")
#define MILNE_OMP_DYNAMIC_LOOP _Pragma("omp parallel for schedule(dynamic, 8)")
#else
#define MILNE_OMP_STATIC_LOOP
#define MILNE_OMP_DYNAMIC_LOOP
#endif

#include <exception>
#include <vector>

namespace milne {

enum class Exec { serial, parallel };

// Runs body(i) for i in [0, n); results must go to per-index slots.  An
// exception escaping any body is rethrown after the loop (lowest index wins).
template <class Body>
void for_each_index(long n, Exec exec, Body&& body) {
  std::vector<std::exception_ptr> err(n > 0 ? n : 0);
  auto guarded = [&](long i) {
    try {
      body(i);
    } catch (...) {
      err[i] = std::current_exception();
    }
  };
  if (exec == Exec::parallel) {
    MILNE_OMP_DYNAMIC_LOOP
    for (long i = 0; i < n; ++i) guarded(i);
  } else {
    for (long i = 0; i < n; ++i) guarded(i);
  }
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
}

// Reads MILNE_LAB_THREADS once and applies it as the OpenMP thread cap.
// Returns the number of threads parallel kernels will use.
int apply_thread_cap();
int max_threads();

}  // namespace milne
