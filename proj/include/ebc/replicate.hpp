#ifndef EBC_REPLICATE_HPP
#define EBC_REPLICATE_HPP

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "ebc/rng.hpp"

namespace ebc {

inline unsigned default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(rep, rng) for rep = 0..count-1 on a small worker pool.  Each
// replicate owns an RNG substream keyed by (master_seed, rep) and writes to
// its own slot, so the result vector is independent of scheduling and thread
// count.
template <typename T>
std::vector<T> run_replicates(std::int64_t count, std::uint64_t master_seed,
                              const std::function<T(std::int64_t, Rng&)>& fn,
                              unsigned threads = 0) {
  if (threads == 0) {
    threads = default_thread_count();
  }
  std::vector<T> results(static_cast<std::size_t>(count));
  if (count == 0) {
    return results;
  }
  if (threads <= 1 || count == 1) {
    for (std::int64_t rep = 0; rep < count; ++rep) {
      Rng rng = make_rng(master_seed, static_cast<std::uint64_t>(rep));
      results[static_cast<std::size_t>(rep)] = fn(rep, rng);
    }
    return results;
  }
  std::atomic<std::int64_t> next(0);
  std::exception_ptr error;
  std::atomic<bool> failed(false);
  auto worker = [&]() {
    for (;;) {
      const std::int64_t rep = next.fetch_add(1);
      if (rep >= count || failed.load()) {
        return;
      }
      try {
        Rng rng = make_rng(master_seed, static_cast<std::uint64_t>(rep));
        results[static_cast<std::size_t>(rep)] = fn(rep, rng);
      } catch (...) {
        if (!failed.exchange(true)) {
          error = std::current_exception();
        }
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n_workers = std::min<unsigned>(threads, static_cast<unsigned>(count));
  pool.reserve(n_workers);
  for (unsigned i = 0; i < n_workers; ++i) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) {
    t.join();
  }
  if (failed.load()) {
    std::rethrow_exception(error);
  }
  return results;
}

}  // namespace ebc

#endif  // EBC_REPLICATE_HPP
