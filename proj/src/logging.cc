// Copyright 2026 The dpnc Authors.
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

#include "dpnc/logging.h"

#include <atomic>
#include <iostream>
#include <mutex>

namespace dpnc {
namespace {

std::atomic<int64_t> warning_count{0};
std::atomic<bool> quiet{false};
std::mutex stderr_mutex;

}  // namespace

void Warn(std::string_view message) {
  warning_count.fetch_add(1, std::memory_order_relaxed);
  if (quiet.load(std::memory_order_relaxed)) return;
  std::lock_guard<std::mutex> lock(stderr_mutex);
  std::cerr << "[dpnc warning] " << message << '\n';
}

int64_t WarningCount() { return warning_count.load(std::memory_order_relaxed); }

void SetWarningsQuiet(bool q) { quiet.store(q, std::memory_order_relaxed); }

}  // namespace dpnc
