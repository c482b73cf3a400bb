#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace noisyldpc {

/// Number of workers to use for a requested count; 0 means all cores.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i, worker) for i in [0, n) on up to `threads` workers, where
/// worker < worker_count(n, threads) identifies the calling thread. Items are
/// handed out dynamically, so results must not depend on which worker runs
/// an item. The first exception thrown by any item is rethrown on the caller.
inline std::size_t worker_count(std::size_t n, int threads) {
  return std::max<std::size_t>(1, std::min<std::size_t>(resolve_threads(threads), n));
}

template <class Body>
void parallel_for_workers(std::size_t n, int threads, Body&& body) {
  const std::size_t workers = worker_count(n, threads);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i, std::size_t{0});
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&](std::size_t worker) {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        body(i, worker);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// parallel_for_workers without the worker index.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  parallel_for_workers(n, threads, [&](std::size_t i, std::size_t) { body(i); });
}

}  // namespace noisyldpc
