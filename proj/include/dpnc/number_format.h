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


#ifndef DPNC_NUMBER_FORMAT_H_
#define DPNC_NUMBER_FORMAT_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace dpnc {

// Shortest decimal string that parses back to exactly `value`
// (e.g. 1.0 -> "1", 0.03125 -> "0.03125").
std::string FormatShortest(double value);

absl::StatusOr<double> ParseDouble(std::string_view text);

}  // namespace dpnc

#endif  // DPNC_NUMBER_FORMAT_H_
