// Copyright 2026 The liberation-lab Authors - All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LIBLAB_PARALLEL_HPP
#define LIBLAB_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace liblab {

// Worker count: LIBLAB_THREADS if set (>= 1), otherwise the hardware count.
inline int thread_count() {
  int hw = int(std::max(1u, std::thread::hardware_concurrency()));
  if (const char *env = std::getenv("LIBLAB_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return hw;
}

// Runs body(k) for k in [0, n) on up to thread_count() threads. Work is split
// in contiguous chunks; callers write results into per-index slots so the
// outcome does not depend on the schedule.
template <class F>
void parallel_for(int n, F &&body) {
  int nt = std::min(thread_count(), n);
  if (nt <= 1) {
    for (int k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nt));
  for (int w = 0; w < nt; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int k = w; k < n; k += nt) body(k);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace liblab

#endif
