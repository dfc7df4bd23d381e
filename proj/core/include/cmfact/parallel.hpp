#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace cmfact {

inline unsigned resolve_workers(unsigned requested) {
  if (requested) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Splits [begin, end) into contiguous chunks, evaluates chunk(lo, hi) on each and folds the
// partial results left to right, so the outcome never depends on the worker count.
template <class Result, class Chunk, class Merge>
Result parallel_reduce(std::int64_t begin, std::int64_t end, unsigned workers, Result init, Chunk chunk, Merge merge) {
  if (end <= begin) return init;
  std::int64_t span = end - begin;
  auto w = static_cast<std::int64_t>(std::min<std::int64_t>(resolve_workers(workers), span));
  if (w <= 1) return merge(std::move(init), chunk(begin, end));
  std::vector<Result> partial(static_cast<std::size_t>(w));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
  std::vector<std::thread> pool;
  for (std::int64_t i = 0; i < w; ++i) {
    std::int64_t lo = begin + span * i / w;
    std::int64_t hi = begin + span * (i + 1) / w;
    pool.emplace_back([&, i, lo, hi] {
      try {
        partial[static_cast<std::size_t>(i)] = chunk(lo, hi);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& r : partial) init = merge(std::move(init), std::move(r));
  return init;
}

}  // namespace cmfact
