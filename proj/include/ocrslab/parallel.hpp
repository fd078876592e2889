// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ocrslab {

/// Runs fn(chunk_index, thread_index) for every chunk in [0, num_chunks),
/// distributing chunks round-robin over `threads` workers. Chunk-to-work
/// mapping is independent of the thread count, so results aggregated by
/// chunk index (or by any commutative exact reduction) do not depend on
/// parallelism. Exceptions are rethrown on the caller thread.
template <typename Fn>
void parallel_chunks(int64_t num_chunks, int threads, Fn&& fn) {
  if (threads <= 1 || num_chunks <= 1) {
    for (int64_t c = 0; c < num_chunks; ++c) fn(c, 0);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int64_t c = t; c < num_chunks; c += threads) fn(c, t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ocrslab
