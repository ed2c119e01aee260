#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace ellset {

/// Worker count for sampling loops: TOOLKIT_WORKERS if set, otherwise the
/// hardware concurrency capped at 8.
inline int worker_count() {
  if (const char* env = std::getenv("TOOLKIT_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  return static_cast<int>(hw > 8 ? 8 : hw);
}

/// Runs fn(i) for i in [0, count). Work is split statically over the
/// workers; fn must only write to per-index slots. Exceptions are
/// re-thrown from the lowest failing index so error behavior does not
/// depend on the worker count either.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  int workers = worker_count();
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::size_t nw = static_cast<std::size_t>(workers);
  if (nw > count) nw = count;
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += nw) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < count; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

}  // namespace ellset
