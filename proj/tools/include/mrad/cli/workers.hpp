#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace mrad::cli {

/// Worker count from, in order: `requested` (> 0), the MRAD_WORKERS
/// environment variable, the number of logical CPUs.
unsigned resolve_workers(unsigned requested);

/// Runs produce(i) for i in [0, n) on up to `workers` threads and hands the
/// results to consume(i, value) on the calling thread in index order. At most
/// `window` results are held at a time, so memory stays bounded however
/// large n is. An exception from produce is rethrown from consume's thread
/// after the workers stop.
template <class T, class Produce, class Consume>
void ordered_parallel(std::size_t n, unsigned workers, Produce produce, Consume consume,
                      std::size_t window = 0) {
  if (n == 0) return;
  workers = std::max(1u, workers);
  if (window == 0) window = 2 * static_cast<std::size_t>(workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) consume(i, produce(i));
    return;
  }

  std::vector<std::optional<T>> slots(window);
  std::mutex mutex;
  std::condition_variable ready;   // a slot was filled
  std::condition_variable drained; // the consumer advanced
  std::size_t next_index = 0;      // next index to hand out
  std::size_t consumed = 0;        // results already consumed
  std::exception_ptr failure;
  std::atomic<bool> stop{false};

  auto work = [&] {
    for (;;) {
      std::size_t i;
      {
        std::unique_lock lock(mutex);
        drained.wait(lock, [&] { return stop || next_index >= n || next_index < consumed + window; });
        if (stop || next_index >= n) return;
        i = next_index++;
      }
      try {
        T value = produce(i);
        std::lock_guard lock(mutex);
        slots[i % window].emplace(std::move(value));
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
      ready.notify_all();
      drained.notify_all();
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);

  for (std::size_t i = 0; i < n; ++i) {
    std::optional<T> value;
    {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return stop || slots[i % window].has_value(); });
      if (!slots[i % window]) break;  // stopped
      value = std::move(slots[i % window]);
      slots[i % window].reset();
      ++consumed;
    }
    drained.notify_all();
    try {
      consume(i, std::move(*value));
    } catch (...) {
      {
        std::lock_guard lock(mutex);
        stop = true;
      }
      drained.notify_all();
      pool.clear();
      throw;
    }
  }
  {
    std::lock_guard lock(mutex);
    stop = true;
  }
  drained.notify_all();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mrad::cli
