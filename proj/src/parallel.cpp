#include "visaddle/parallel.hpp"

#include <atomic>

namespace visaddle::par {

namespace {
std::atomic<bool> g_enabled{true};
}

bool enabled() { return g_enabled.load(std::memory_order_relaxed); }

void set_enabled(bool on) { g_enabled.store(on, std::memory_order_relaxed); }

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace visaddle::par
