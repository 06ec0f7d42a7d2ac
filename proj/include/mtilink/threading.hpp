#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace mtilink {

// Runs fn(0..n-1) across up to `threads` workers. Indices are strided, every
// result slot is owned by exactly one index, and the lowest-index exception
// wins, so output and error behaviour are identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, const Fn& fn) {
  if (threads < 1) threads = 1;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), n == 0 ? 1 : n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

// Worker-count resolution: explicit flag, then MTILINK_THREADS, then 1.
inline int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("MTILINK_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

}  // namespace mtilink
