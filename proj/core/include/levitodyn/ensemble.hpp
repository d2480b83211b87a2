#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace levitodyn {

// Thread count from an explicit request, then LEVITODYN_THREADS, then the
// hardware concurrency. Throws InvalidArgument for a malformed variable or a
// non-positive request.
int resolve_threads(std::optional<int> requested);

// Runs fn(i) for i in [0, count) on `threads` workers. Results are stored by
// index, so the output does not depend on scheduling. If any call throws, the
// exception with the lowest index is rethrown after all workers finish.
template <typename Fn>
auto parallel_map(std::size_t count, int threads, Fn&& fn) {
  using Result = decltype(fn(std::size_t{}));
  std::vector<std::optional<Result>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(threads > 0 ? threads : 1));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace levitodyn
