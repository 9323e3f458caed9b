#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace cardguess {

/// Worker count from CARDGUESS_WORKERS, else the hardware thread count.
inline int default_workers() {
  if (const char* env = std::getenv("CARDGUESS_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Runs body(worker_state, index) for index in [0, count), splitting the range
/// into contiguous blocks, one per worker. Each worker gets its own state from
/// make_state(). Results must be written by index so the outcome does not
/// depend on the worker count.
template <typename MakeState, typename Body>
void parallel_for(std::int64_t count, int workers, MakeState make_state, Body body) {
  workers = static_cast<int>(std::clamp<std::int64_t>(workers, 1, std::max<std::int64_t>(1, count)));
  auto run_block = [&](std::int64_t begin, std::int64_t end) {
    auto state = make_state();
    for (std::int64_t i = begin; i < end; ++i) body(state, i);
  };
  if (workers == 1) {
    run_block(0, count);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::int64_t chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = std::min(count, w * chunk);
    const std::int64_t end = std::min(count, begin + chunk);
    threads.emplace_back([&, begin, end] {
      try {
        run_block(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace cardguess
