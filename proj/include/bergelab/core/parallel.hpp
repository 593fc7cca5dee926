#pragma once

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace bergelab {

/** @brief Worker cap from BERGELAB_WORKERS, else hardware concurrency. */
inline unsigned worker_count() {
  if (const char* env = std::getenv("BERGELAB_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/**
 * @brief Runs fn(i) for i in [0, n) on up to `workers` threads.
 *
 * Each index writes only its own slot, so results do not depend on scheduling.
 * The exception of the lowest failing index is rethrown.
 */
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned workers = worker_count()) {
  if (n == 0) return;
  unsigned w = workers == 0 ? 1 : workers;
  if (w > n) w = static_cast<unsigned>(n);
  std::vector<std::exception_ptr> errors(n);
  auto body = [&](unsigned t) {
    for (std::size_t i = t; i < n; i += w) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (w == 1) {
    body(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (unsigned t = 0; t < w; ++t) threads.emplace_back(body, t);
    for (auto& th : threads) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bergelab
