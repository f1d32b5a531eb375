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


#include "dpnc/results_csv.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "dpnc/number_format.h"
#include "dpnc/status_macros.h"

namespace dpnc {
namespace {

absl::Status CheckText(std::string_view field, std::string_view value) {
  if (value.find_first_of(",\n\r") != std::string_view::npos) {
    return absl::InvalidArgumentError(absl::StrCat(
        "CSV field ", std::string(field), " may not contain ',' or newlines: \"",
        std::string(value), "\""));
  }
  return absl::OkStatus();
}

template <typename Int>
absl::StatusOr<Int> ParseInt(std::string_view text) {
  Int value{};
  const auto result =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("not an integer: \"", std::string(text), "\""));
  }
  return value;
}

absl::Status WriteText(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::UnavailableError("cannot open " + path);
  out << text;
  out.flush();
  if (!out) return absl::DataLossError("write failed: " + path);
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::string> FormatResultsCsv(
    const std::vector<ResultRow>& rows) {
  std::string out(kResultsHeader);
  out += '\n';
  for (const ResultRow& r : rows) {
    DPNC_RETURN_IF_ERROR(CheckText("experiment", r.experiment));
    DPNC_RETURN_IF_ERROR(CheckText("algorithm", r.algorithm));
    DPNC_RETURN_IF_ERROR(CheckText("knob", r.knob));
    absl::StrAppend(&out, r.experiment, ",", r.seed, ",", r.n, ",", r.d, ",",
                    FormatShortest(r.epsilon), ",", FormatShortest(r.delta),
                    ",", r.algorithm, ",", r.knob, ",",
                    FormatShortest(r.knob_value), ",",
                    FormatShortest(r.excess_risk), ",",
                    FormatShortest(r.std_error), ",",
                    FormatShortest(r.wall_ms), ",", r.noise_events, "\n");
  }
  return out;
}

absl::StatusOr<std::vector<ResultRow>> ParseResultsCsv(std::string_view text) {
  std::vector<absl::string_view> lines =
      absl::StrSplit(absl::string_view(text.data(), text.size()), '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || std::string_view(lines[0].data(), lines[0].size()) !=
                           kResultsHeader) {
    return absl::InvalidArgumentError("results CSV header mismatch");
  }
  std::vector<ResultRow> rows;
  for (size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string_view> cells;
    for (absl::string_view c : absl::StrSplit(lines[i], ',')) {
      cells.emplace_back(c.data(), c.size());
    }
    if (cells.size() != 13) {
      return absl::InvalidArgumentError(absl::StrCat(
          "results CSV line ", i + 1, " has ", cells.size(),
          " fields, expected 13"));
    }
    ResultRow r;
    r.experiment = std::string(cells[0]);
    DPNC_ASSIGN_OR_RETURN(r.seed, ParseInt<uint64_t>(cells[1]));
    DPNC_ASSIGN_OR_RETURN(r.n, ParseInt<int64_t>(cells[2]));
    DPNC_ASSIGN_OR_RETURN(r.d, ParseInt<int64_t>(cells[3]));
    DPNC_ASSIGN_OR_RETURN(r.epsilon, ParseDouble(cells[4]));
    DPNC_ASSIGN_OR_RETURN(r.delta, ParseDouble(cells[5]));
    r.algorithm = std::string(cells[6]);
    r.knob = std::string(cells[7]);
    DPNC_ASSIGN_OR_RETURN(r.knob_value, ParseDouble(cells[8]));
    DPNC_ASSIGN_OR_RETURN(r.excess_risk, ParseDouble(cells[9]));
    DPNC_ASSIGN_OR_RETURN(r.std_error, ParseDouble(cells[10]));
    DPNC_ASSIGN_OR_RETURN(r.wall_ms, ParseDouble(cells[11]));
    DPNC_ASSIGN_OR_RETURN(r.noise_events, ParseInt<int64_t>(cells[12]));
    rows.push_back(std::move(r));
  }
  return rows;
}

absl::Status WriteCsv(const std::vector<ResultRow>& rows,
                      const std::string& path) {
  DPNC_ASSIGN_OR_RETURN(const std::string text, FormatResultsCsv(rows));
  return WriteText(text, path);
}

absl::StatusOr<std::vector<ResultRow>> ReadCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseResultsCsv(buffer.str());
}

absl::StatusOr<std::string> FormatNoiseLog(
    const std::vector<NoiseEvent>& events) {
  std::string out(kNoiseLogHeader);
  out += '\n';
  for (const NoiseEvent& e : events) {
    DPNC_RETURN_IF_ERROR(CheckText("mechanism", e.mechanism));
    absl::StrAppend(&out, e.iteration, ",", e.mechanism, ",",
                    FormatShortest(e.sensitivity), ",",
                    FormatShortest(e.stddev), ",", e.dimension, "\n");
  }
  return out;
}

absl::Status WriteNoiseLog(const std::vector<NoiseEvent>& events,
                           const std::string& path) {
  DPNC_ASSIGN_OR_RETURN(const std::string text, FormatNoiseLog(events));
  return WriteText(text, path);
}

}  // namespace dpnc
