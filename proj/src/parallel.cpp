#include "vulnaudit/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace vulnaudit {

std::size_t thread_count() {
  if (const char* env = std::getenv("VULNAUDIT_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
      // fall through to auto
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers = std::min(thread_count(), n);
  if (workers == 1) {
    body(0, n, 0);
    return;
  }
  // Over-split so uneven per-item costs still balance.
  const std::size_t chunks = std::min(n, workers * 8);
  std::size_t next = 0;
  std::mutex mu;
  std::exception_ptr failure;

  auto run = [&](std::size_t worker) {
    for (;;) {
      std::size_t chunk;
      {
        std::lock_guard lock(mu);
        if (next == chunks || failure) return;
        chunk = next++;
      }
      const std::size_t begin = n * chunk / chunks;
      const std::size_t end = n * (chunk + 1) / chunks;
      try {
        body(begin, end, worker);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace vulnaudit
