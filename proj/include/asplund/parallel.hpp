#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace asplund {

/// 0 means one thread per hardware core.
inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(row) for every row in [0, rows), split into contiguous blocks over
/// at most `threads` workers. fn must only write state owned by its row.
template <class Fn>
void for_each_row(int rows, unsigned threads, Fn&& fn) {
  const int workers = static_cast<int>(std::min<unsigned>(resolve_threads(threads),
                                                          static_cast<unsigned>(std::max(rows, 1))));
  if (workers <= 1) {
    for (int r = 0; r < rows; ++r) fn(r);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      const int begin = static_cast<int>(static_cast<long long>(rows) * w / workers);
      const int end = static_cast<int>(static_cast<long long>(rows) * (w + 1) / workers);
      pool.emplace_back([&, begin, end] {
        try {
          for (int r = begin; r < end; ++r) fn(r);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace asplund
