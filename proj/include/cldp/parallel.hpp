#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "cldp/random.hpp"

namespace cldp {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(rep_index, stream) for rep_index in [0, n) and returns the
/// per-replication values in index order. Replication i always uses stream
/// stream_base + i of `seed`, and callers reduce the returned vector
/// sequentially, so results are byte-identical for any thread count.
/// The first exception thrown by a worker is rethrown after join.
template <typename Fn>
std::vector<double> replicate(long n, std::uint64_t seed,
                              std::uint64_t stream_base, int threads,
                              Fn&& fn) {
  std::vector<double> results(static_cast<std::size_t>(n));
  const int n_threads = std::min<long>(resolve_threads(threads), std::max<long>(n, 1));

  if (n_threads <= 1) {
    for (long i = 0; i < n; ++i) {
      RngStream stream(seed, stream_base + static_cast<std::uint64_t>(i));
      results[static_cast<std::size_t>(i)] = fn(i, stream);
    }
    return results;
  }

  std::vector<std::thread> workers;
  std::exception_ptr error;
  std::mutex error_mutex;
  const long block = (n + n_threads - 1) / n_threads;
  for (int w = 0; w < n_threads; ++w) {
    const long begin = static_cast<long>(w) * block;
    const long end = std::min(n, begin + block);
    if (begin >= end) break;
    workers.emplace_back([&, begin, end] {
      try {
        for (long i = begin; i < end; ++i) {
          RngStream stream(seed, stream_base + static_cast<std::uint64_t>(i));
          results[static_cast<std::size_t>(i)] = fn(i, stream);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace cldp
