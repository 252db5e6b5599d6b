#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace opnorm {

struct ExecOptions {
  // Worker cap; 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
};

inline unsigned resolve_threads(const ExecOptions& exec) {
  unsigned t = exec.threads ? exec.threads : std::thread::hardware_concurrency();
  return std::max(1u, t);
}

// Calls fn(i) for i in [0, count) on up to `threads` workers. Work items are
// claimed dynamically; callers write results into slot i so the outcome does
// not depend on scheduling. The first exception thrown (lowest index wins
// when several fail) is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t count, const ExecOptions& exec, Fn&& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(exec), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  std::size_t err_index = count;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  pool.clear();
  if (err) std::rethrow_exception(err);
}

}  // namespace opnorm
