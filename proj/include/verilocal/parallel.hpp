#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace verilocal {

/// Worker count: explicit request, else VERILOCAL_THREADS, else hardware concurrency.
inline unsigned resolve_threads(unsigned requested = 0) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("VERILOCAL_THREADS")) {
      try {
        n = static_cast<unsigned>(std::stoul(env));
      } catch (const std::exception&) {
        n = 0;
      }
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

/**
 * Runs body(begin, end, acc) over [0, n) in chunks pulled from a shared
 * counter. Each worker owns one accumulator; the caller merges them, so the
 * reduction must be commutative for the result to be order independent.
 */
template <class Acc, class Body>
std::vector<Acc> parallel_reduce_chunks(std::uint64_t n, unsigned threads, const Acc& init, Body body,
                                        std::uint64_t chunk = 256) {
  threads = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, (n + chunk - 1) / chunk)));
  std::vector<Acc> accs(threads, init);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](unsigned w) {
    try {
      for (;;) {
        const std::uint64_t begin = next.fetch_add(chunk);
        if (begin >= n) break;
        body(begin, std::min(n, begin + chunk), accs[w]);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return accs;
}

}  // namespace verilocal
