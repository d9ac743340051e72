#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "mmeval/ffield.hpp"

namespace mmeval {

/// Calls body(i) for i in [0, count) on up to `threads` workers, split into
/// contiguous blocks. Each worker counts into a private OpCounter; the totals
/// are added to the caller's active counter after all workers join. The first
/// exception thrown by any worker is rethrown.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<ff::OpCounter> counters(workers);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = count * w / workers;
    const std::size_t hi = count * (w + 1) / workers;
    pool.emplace_back([&, w, lo, hi] {
      ff::CounterScope scope(counters[w]);
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  ff::OpCounter sum;
  for (const auto& c : counters) sum += c;
  ff::charge(sum.adds, sum.muls, sum.invs);
}

}  // namespace mmeval
