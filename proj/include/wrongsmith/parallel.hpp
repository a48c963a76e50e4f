#pragma once

// Index-ordered map kernels. The OpenMP variant may evaluate items in any
// order on any thread, but results land in their own slot, so a caller that
// reduces the returned vector left to right gets the same bits as the serial
// reference regardless of thread count.

#include <cstddef>
#include <exception>
#include <mutex>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace wrongsmith::parallel {

template <class F>
auto map_serial(std::size_t n, F&& f) {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(f(i));
  return out;
}

template <class F>
auto map(std::size_t n, F&& f) {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(n);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline int max_threads() { return omp_get_max_threads(); }

}  // namespace wrongsmith::parallel
