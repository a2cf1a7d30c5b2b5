#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace maltopic {

/// Calls fn(i) for i in [0, count) on up to `degree` threads. Returns the
/// exception thrown for each index (null where fn succeeded).
template <typename Fn>
std::vector<std::exception_ptr> parallel_for(std::size_t count, std::size_t degree, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  if (count == 0) return errors;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(degree, 1, count);
  if (threads == 1) {
    worker();
    return errors;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  return errors;
}

}  // namespace maltopic
