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


// Result rows and noise logs as CSV. Numbers use the shortest round-trip
// decimal form; lines end in "\n"; fields are never quoted, so text fields
// may not contain commas or newlines.

#ifndef DPNC_RESULTS_CSV_H_
#define DPNC_RESULTS_CSV_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpnc/privacy.h"

namespace dpnc {

inline constexpr std::string_view kResultsHeader =
    "experiment,seed,n,d,epsilon,delta,algorithm,knob,knob_value,excess_risk,"
    "stderr,wall_ms,noise_events";
inline constexpr std::string_view kNoiseLogHeader =
    "iteration,mechanism,sensitivity,stddev,dimension";

struct ResultRow {
  std::string experiment;
  uint64_t seed = 0;
  int64_t n = 0;
  int64_t d = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::string algorithm;
  std::string knob;
  double knob_value = 0.0;
  // Excess risk against the ground truth, or raw test loss when there is none.
  double excess_risk = 0.0;
  double std_error = 0.0;
  double wall_ms = 0.0;
  int64_t noise_events = 0;

  bool operator==(const ResultRow&) const = default;
};

absl::StatusOr<std::string> FormatResultsCsv(const std::vector<ResultRow>& rows);
absl::StatusOr<std::vector<ResultRow>> ParseResultsCsv(std::string_view text);
absl::Status WriteCsv(const std::vector<ResultRow>& rows,
                      const std::string& path);
absl::StatusOr<std::vector<ResultRow>> ReadCsv(const std::string& path);

absl::StatusOr<std::string> FormatNoiseLog(const std::vector<NoiseEvent>& events);
absl::Status WriteNoiseLog(const std::vector<NoiseEvent>& events,
                           const std::string& path);

}  // namespace dpnc

#endif  // DPNC_RESULTS_CSV_H_
