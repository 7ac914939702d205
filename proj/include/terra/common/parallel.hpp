// Copyright 2026 The Terra Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace terra {

/// Worker count used by parallel_for. Defaults to TERRA_THREADS when set,
/// otherwise std::thread::hardware_concurrency().
int thread_count();
void set_thread_count(int n);

/// Runs task(i) for i in [0, count). Nested calls run serially on the
/// calling worker. Tasks are claimed dynamically, so each
/// task must write only its own outputs; results are then independent of
/// scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace terra
