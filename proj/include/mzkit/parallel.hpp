#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mzkit {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// processed exactly once and results must be written to per-index slots by
/// the caller, so the outcome is identical for any thread count. A throwing
/// task does not tear the process down: the exception of the smallest
/// failing index is rethrown on the calling thread after all workers join.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::size_t nw = std::min<std::size_t>(threads, count);
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
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace mzkit
