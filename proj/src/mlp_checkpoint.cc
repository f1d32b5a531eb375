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


#include "dpnc/mlp_checkpoint.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpnc/status_macros.h"
#include "json.hpp"

namespace dpnc {
namespace {

using nlohmann::json;

absl::StatusOr<int64_t> RequireInt(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_integer()) {
    return absl::InvalidArgumentError(
        absl::StrCat("checkpoint field \"", key, "\" missing or not an integer"));
  }
  return doc[key].get<int64_t>();
}

}  // namespace

absl::StatusOr<std::string> CheckpointToJson(const MlpParams& params) {
  DPNC_RETURN_IF_ERROR(ValidateShapes(params));
  json doc;
  doc["version"] = kCheckpointVersion;
  doc["L"] = params.depth();
  doc["m"] = params.width();
  doc["d"] = params.input_dim();
  json layers = json::array();
  for (const auto& w : params.layers) {
    json flat = json::array();
    for (int64_t i = 0; i < w.rows(); ++i) {
      for (int64_t j = 0; j < w.cols(); ++j) {
        if (!std::isfinite(w(i, j))) {
          return absl::InvalidArgumentError(
              "checkpoint entries must be finite");
        }
        flat.push_back(w(i, j));
      }
    }
    layers.push_back(std::move(flat));
  }
  doc["layers"] = std::move(layers);
  return doc.dump();
}

absl::StatusOr<MlpParams> CheckpointFromJson(const std::string& text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("checkpoint is not a JSON object");
  }
  for (const auto& item : doc.items()) {
    const std::string& key = item.key();
    if (key != "version" && key != "L" && key != "m" && key != "d" &&
        key != "layers") {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown checkpoint field \"", key, "\""));
    }
  }
  DPNC_ASSIGN_OR_RETURN(const int64_t version, RequireInt(doc, "version"));
  if (version != kCheckpointVersion) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported checkpoint version ", version));
  }
  DPNC_ASSIGN_OR_RETURN(const int64_t depth, RequireInt(doc, "L"));
  DPNC_ASSIGN_OR_RETURN(const int64_t width, RequireInt(doc, "m"));
  DPNC_ASSIGN_OR_RETURN(const int64_t dim, RequireInt(doc, "d"));
  if (depth < 2 || width < 1 || dim < 1) {
    return absl::InvalidArgumentError("checkpoint needs L >= 2, m >= 1, d >= 1");
  }
  if (!doc.contains("layers") || !doc["layers"].is_array() ||
      static_cast<int64_t>(doc["layers"].size()) != depth) {
    return absl::InvalidArgumentError(
        absl::StrCat("checkpoint must hold ", depth, " layers"));
  }
  MlpParams params;
  for (int64_t l = 0; l < depth; ++l) {
    const int64_t rows = l + 1 == depth ? 1 : width;
    const int64_t cols = l == 0 ? dim : width;
    const json& flat = doc["layers"][l];
    if (!flat.is_array() || static_cast<int64_t>(flat.size()) != rows * cols) {
      return absl::InvalidArgumentError(absl::StrCat(
          "layer ", l + 1, " must hold ", rows * cols, " numbers"));
    }
    Eigen::MatrixXd w(rows, cols);
    for (int64_t i = 0; i < rows; ++i) {
      for (int64_t j = 0; j < cols; ++j) {
        const json& v = flat[i * cols + j];
        if (!v.is_number()) {
          return absl::InvalidArgumentError(
              absl::StrCat("layer ", l + 1, " has a non-numeric entry"));
        }
        w(i, j) = v.get<double>();
      }
    }
    params.layers.push_back(std::move(w));
  }
  return params;
}

absl::Status WriteCheckpoint(const MlpParams& params, const std::string& path) {
  DPNC_ASSIGN_OR_RETURN(const std::string text, CheckpointToJson(params));
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::UnavailableError("cannot open " + path);
  out << text << '\n';
  if (!out) return absl::DataLossError("write failed: " + path);
  return absl::OkStatus();
}

absl::StatusOr<MlpParams> ReadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return CheckpointFromJson(buffer.str());
}

}  // namespace dpnc
