#pragma once

#include <cstddef>
#include <functional>

namespace stokes_prox {

/// Upper bound on worker threads. Reads STOKES_PROX_THREADS once; defaults to
/// the hardware concurrency. A value set with set_thread_cap wins.
std::size_t thread_cap();
void set_thread_cap(std::size_t threads);

/// Runs body(i) for i in [0, count). Each index must write only its own
/// outputs; with that contract the result is independent of the thread count.
/// Small workloads (count * cost_hint below a threshold) run inline.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t cost_hint = 1);

}  // namespace stokes_prox
