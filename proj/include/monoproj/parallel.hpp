#pragma once

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace monoproj {

// Effective worker count: explicit request, else the MONOPROJ_THREADS
// environment cap, else hardware concurrency.
inline int effective_threads(int requested) {
  int t = requested;
  if (t <= 0) {
    if (const char* env = std::getenv("MONOPROJ_THREADS")) {
      t = std::atoi(env);
    }
  }
  if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
  if (t <= 0) t = 1;
  return t;
}

// Runs fn(i) for i in [0, n). Exceptions are captured per index so the caller
// can handle them in index order, which keeps behaviour independent of the
// thread schedule.
template <typename Fn>
std::vector<std::exception_ptr> parallel_for(int n, int threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  const int workers = std::min(std::max(threads, 1), std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    return errors;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  return errors;
}

}  // namespace monoproj
