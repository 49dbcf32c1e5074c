// Chunked parallel loop over [0, n). Results must not depend on the
// partition: bodies write to disjoint slots and do no shared reductions.
#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spherelab {

// Thread count from SPHERELAB_THREADS, falling back to the hardware count.
inline int default_thread_count() {
  if (const char* env = std::getenv("SPHERELAB_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// body(begin, end) is called once per contiguous range; ranges partition
// [0, n). Lets the body hoist per-range scratch out of the element loop.
// `grain` is the minimum number of elements that justifies one extra thread;
// below it the loop runs inline, avoiding per-call thread spawns.
template <class Body>
void parallel_for_ranges(int n, Body&& body, int grain = 1) {
  const int threads =
      std::min(default_thread_count(), std::max(1, n / std::max(1, grain)));
  if (threads <= 1) {
    if (n > 0) body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

template <class Body>
void parallel_for(int n, Body&& body, int grain = 1) {
  parallel_for_ranges(
      n,
      [&](int begin, int end) {
        for (int i = begin; i < end; ++i) body(i);
      },
      grain);
}

}  // namespace spherelab
