#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lrsm {

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Work items
/// must be independent; the first exception thrown by any item is rethrown.
/// Falls back to a plain loop on single-core hosts or for n <= 1.
template <class Fn>
void parallel_for(int n, Fn&& fn) {
  const int workers =
      std::min<int>(n, static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace lrsm
