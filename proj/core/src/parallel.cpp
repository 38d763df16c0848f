#include "stokes_prox/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace stokes_prox {

namespace {

constexpr std::size_t kInlineWork = std::size_t{1} << 16;

std::size_t env_thread_cap() {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("STOKES_PROX_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return hw;
}

std::atomic<std::size_t>& cap_override() {
  static std::atomic<std::size_t> value{0};
  return value;
}

}  // namespace

std::size_t thread_cap() {
  const std::size_t forced = cap_override().load();
  if (forced > 0) return forced;
  static const std::size_t from_env = env_thread_cap();
  return from_env;
}

void set_thread_cap(std::size_t threads) { cap_override().store(threads); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t cost_hint) {
  const std::size_t workers = std::min(thread_cap(), count);
  if (workers <= 1 || count * cost_hint < kInlineWork) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::mutex error_mutex;
  std::exception_ptr error;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace stokes_prox
