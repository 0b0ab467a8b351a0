#include "trendshift/parallel.hpp"

namespace trendshift {

namespace {
std::atomic<int> g_threads{0};
}

int default_threads() {
  const int configured = g_threads.load();
  if (configured > 0) return configured;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void set_default_threads(int threads) { g_threads.store(threads > 0 ? threads : 0); }

}  // namespace trendshift
