#pragma once

#include <cstddef>
#include <exception>

namespace causalx::detail {

// Runs fn(i) for i in [0, n) on an OpenMP team and rethrows the first
// exception on the calling thread. threads = 0 uses the runtime default.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, int threads = 0) {
  std::exception_ptr failure;
  auto body = [&](std::ptrdiff_t i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(causalx_parallel_for_failure)
      if (!failure) failure = std::current_exception();
    }
  };
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (threads > 0) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace causalx::detail
