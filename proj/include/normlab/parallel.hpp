#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace nlab {

// Worker count: NORMALITY_LAB_THREADS when set to a positive integer,
// otherwise the hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("NORMALITY_LAB_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

// Runs body(i) for i in [0, count). Results must be written to per-index
// slots. The exception of the lowest failing index is rethrown.
template <class Body>
void parallel_for(std::size_t count, const Body& body) {
  const std::size_t workers =
      std::min(count, static_cast<std::size_t>(thread_count()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace nlab
