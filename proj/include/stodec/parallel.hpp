#pragma once

#include "stodec/types.hpp"

#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace stodec {

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/**
 * Runs body(i) for i in [0, count) across at most `threads` workers.
 *
 * The body must only write state owned by index i (disjoint slots); any
 * reduction over the slots belongs after the call, in index order.  Under
 * that contract the result is identical for every thread count, so callers
 * stay bit-reproducible whether they run on one core or many.
 *
 * Indices are split into contiguous blocks, one per worker.  If several
 * workers throw, the exception from the lowest block is rethrown and the
 * rest are dropped.
 */
template <typename F>
void parallel_for(Index count, int threads, F&& body) {
  if (count <= 0) return;
  const int workers =
      static_cast<int>(std::min<Index>(resolve_thread_count(threads), count));
  if (workers <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }

  std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  const Index chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const Index begin = static_cast<Index>(w) * chunk;
    const Index end = std::min(count, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        for (Index i = begin; i < end; ++i) body(i);
      } catch (...) {
        errors[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace stodec
