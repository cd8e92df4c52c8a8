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

#ifndef CLIPCOV_PARALLEL_H_
#define CLIPCOV_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace clipcov {

// Worker count: CLIPCOV_THREADS when set to a positive integer, otherwise the
// number of logical cores. Read on every call.
std::size_t ThreadCount();

// Runs body(i) for every i in [0, n). Iterations are split into contiguous
// chunks; each index is visited exactly once, so writes to per-index slots
// are deterministic regardless of the worker count. Reductions must be done
// by the caller afterwards in index order.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace clipcov

#endif  // CLIPCOV_PARALLEL_H_
