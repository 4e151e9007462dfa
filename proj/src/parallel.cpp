#include "dagdepth/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <exception>

namespace dagdepth::par {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  return omp_get_max_threads();
}

void for_each_index_serial(std::uint64_t count,
                           const std::function<void(std::uint64_t)>& fn) {
  for (std::uint64_t i = 0; i < count; ++i) fn(i);
}

void for_each_index(std::uint64_t count, int workers,
                    const std::function<void(std::uint64_t)>& fn) {
  const int w = resolve_workers(workers);
  if (w <= 1 || count <= 1) {
    for_each_index_serial(count, fn);
    return;
  }

  std::exception_ptr first_error = nullptr;
  std::atomic<bool> failed{false};

#pragma omp parallel for schedule(dynamic, 16) num_threads(w)
  for (long long i = 0; i < static_cast<long long>(count); ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      fn(static_cast<std::uint64_t>(i));
    } catch (...) {
      if (!failed.exchange(true)) first_error = std::current_exception();
    }
  }

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dagdepth::par
