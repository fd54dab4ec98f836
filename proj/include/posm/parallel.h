// include/posm/parallel.h

// Copyright 2026  The posm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef POSM_PARALLEL_H_
#define POSM_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace posm {

/// Worker count: hardware concurrency, capped by the POSM_THREADS
/// environment variable when set.
std::size_t worker_count();

/// Runs fn(k) for k in [0, count) on up to worker_count() threads. Work is
/// split into contiguous blocks; callers that reduce must do so afterwards
/// in index order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)> &fn);

}  // namespace posm

#endif  // POSM_PARALLEL_H_
