// Copyright 2026 The Recrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RECRISK_PARALLEL_H_
#define RECRISK_PARALLEL_H_

#include <cstddef>
#include <functional>

#include "absl/status/status.h"

namespace recrisk {

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// executed exactly once unless a body fails, after which unstarted indices
// are skipped. Returns the error of the lowest failing index, so the result
// does not depend on scheduling.
absl::Status ParallelFor(size_t n, int threads,
                         const std::function<absl::Status(size_t)>& body);

}  // namespace recrisk

#endif  // RECRISK_PARALLEL_H_
