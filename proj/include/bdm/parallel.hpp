#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace bdm {

/// Runs fn(shard) for shard in [0, shards) on up to `threads` workers and
/// rethrows the first exception by shard index.
template <class Fn>
void run_shards(std::size_t shards, unsigned threads, Fn&& fn) {
  if (shards == 0) return;
  threads = std::max(1u, threads);
  if (threads == 1 || shards == 1) {
    for (std::size_t s = 0; s < shards; ++s) fn(s);
    return;
  }
  std::vector<std::exception_ptr> errors(shards);
  std::vector<std::thread> pool;
  const std::size_t workers = std::min<std::size_t>(threads, shards);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t s = w; s < shards; s += workers) {
        try {
          fn(s);
        } catch (...) {
          errors[s] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bdm
