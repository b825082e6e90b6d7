#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace clusterface::detail {

/// Runs fn(begin, end) over [0, count) split into contiguous blocks, one per
/// worker thread. Every index is processed exactly once; callers must write to
/// disjoint slots so the result does not depend on the degree of parallelism.
/// thread_count == 0 picks the hardware concurrency.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t thread_count, Fn&& fn) {
  if (count == 0) return;
  if (thread_count == 0) {
    thread_count = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  thread_count = std::min(thread_count, count);
  if (thread_count <= 1) {
    fn(std::size_t{0}, count);
    return;
  }

  const std::size_t chunk = (count + thread_count - 1) / thread_count;
  std::vector<std::exception_ptr> errors(thread_count);
  std::vector<std::thread> workers;
  workers.reserve(thread_count);
  for (std::size_t t = 0; t < thread_count; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, &errors, t, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (std::thread& w : workers) w.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace clusterface::detail
