#include "knotenergy/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace knotenergy {

unsigned resolve_threads(unsigned requested) noexcept {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_rows(std::size_t rows, unsigned threads, const std::function<void(std::size_t)>& body) {
  const std::size_t blocks = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(rows, 1));
  if (blocks <= 1) {
    for (std::size_t r = 0; r < rows; ++r) body(r);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run_block = [&](std::size_t b) {
    const std::size_t begin = b * rows / blocks;
    const std::size_t end = (b + 1) * rows / blocks;
    try {
      for (std::size_t r = begin; r < end; ++r) body(r);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  {
    std::vector<std::jthread> workers;
    workers.reserve(blocks - 1);
    for (std::size_t b = 1; b < blocks; ++b) workers.emplace_back(run_block, b);
    run_block(0);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace knotenergy
