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

#ifndef DPNC_LOGGING_H_
#define DPNC_LOGGING_H_

#include <cstdint>
#include <string_view>

namespace dpnc {

// Emits a non-fatal warning to stderr. Warnings are used where an input is
// outside the range assumed by a utility guarantee but still well defined.
void Warn(std::string_view message);

// Total number of warnings emitted by this process.
int64_t WarningCount();

// Silences stderr output (the counter still advances).
void SetWarningsQuiet(bool quiet);

}  // namespace dpnc

#endif  // DPNC_LOGGING_H_
