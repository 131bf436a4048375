#include <atomic>
#include <thread>
#include <vector>

#include "rcep/numeric.hpp"

namespace rcep {

namespace {
std::atomic<int> g_threads{0};
}

void set_worker_threads(int threads) { g_threads = std::max(threads, 0); }

int worker_threads() {
  const int requested = g_threads.load();
  if (requested > 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_chunks(Eigen::Index n, Eigen::Index min_chunk,
                     const std::function<void(Eigen::Index, Eigen::Index)>& body) {
  if (n <= 0) return;
  const Eigen::Index workers =
      std::min<Eigen::Index>(worker_threads(), (n + min_chunk - 1) / std::max<Eigen::Index>(min_chunk, 1));
  if (workers <= 1) {
    body(0, n);
    return;
  }
  const Eigen::Index chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (Eigen::Index w = 1; w < workers; ++w) {
    const Eigen::Index begin = w * chunk;
    const Eigen::Index end = std::min(n, begin + chunk);
    if (begin < end) pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(0, std::min(n, chunk));
}

}  // namespace rcep
