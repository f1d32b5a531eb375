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


#include "dpnc/mnist.h"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpnc/internal/norm_ball.h"
#include "dpnc/status_macros.h"

namespace dpnc {
namespace {

absl::StatusOr<std::vector<uint8_t>> ReadBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError("cannot open " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

absl::StatusOr<uint32_t> ReadWord(const std::vector<uint8_t>& bytes,
                                  size_t offset, const std::string& path) {
  if (offset + 4 > bytes.size()) {
    return absl::OutOfRangeError(absl::StrCat(
        path, ": truncated header at offset ", offset, " (file has ",
        bytes.size(), " bytes)"));
  }
  return (static_cast<uint32_t>(bytes[offset]) << 24) |
         (static_cast<uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<uint32_t>(bytes[offset + 3]);
}

absl::Status CheckMagic(uint32_t got, uint32_t want, const std::string& path) {
  if (got == want) return absl::OkStatus();
  return absl::InvalidArgumentError(absl::StrCat(
      path, ": bad magic ", got, " at offset 0, expected ", want));
}

absl::Status CheckPayload(const std::vector<uint8_t>& bytes, size_t header,
                          uint64_t payload, const std::string& path) {
  if (bytes.size() < header + payload) {
    return absl::OutOfRangeError(absl::StrCat(
        path, ": truncated payload, need ", header + payload, " bytes, have ",
        bytes.size()));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Dataset> LoadMnistIdx(const std::string& images_path,
                                     const std::string& labels_path) {
  DPNC_ASSIGN_OR_RETURN(const std::vector<uint8_t> images,
                        ReadBytes(images_path));
  DPNC_ASSIGN_OR_RETURN(const std::vector<uint8_t> labels,
                        ReadBytes(labels_path));

  DPNC_ASSIGN_OR_RETURN(const uint32_t image_magic,
                        ReadWord(images, 0, images_path));
  DPNC_RETURN_IF_ERROR(CheckMagic(image_magic, kIdxImageMagic, images_path));
  DPNC_ASSIGN_OR_RETURN(const uint32_t count, ReadWord(images, 4, images_path));
  DPNC_ASSIGN_OR_RETURN(const uint32_t rows, ReadWord(images, 8, images_path));
  DPNC_ASSIGN_OR_RETURN(const uint32_t cols, ReadWord(images, 12, images_path));

  DPNC_ASSIGN_OR_RETURN(const uint32_t label_magic,
                        ReadWord(labels, 0, labels_path));
  DPNC_RETURN_IF_ERROR(CheckMagic(label_magic, kIdxLabelMagic, labels_path));
  DPNC_ASSIGN_OR_RETURN(const uint32_t label_count,
                        ReadWord(labels, 4, labels_path));

  if (count != label_count) {
    return absl::FailedPreconditionError(absl::StrCat(
        "count mismatch: ", images_path, " declares ", count, " images, ",
        labels_path, " declares ", label_count, " labels"));
  }
  const uint64_t dim = static_cast<uint64_t>(rows) * cols;
  if (dim == 0) {
    return absl::InvalidArgumentError(images_path + ": zero-sized images");
  }
  DPNC_RETURN_IF_ERROR(CheckPayload(images, 16, dim * count, images_path));
  DPNC_RETURN_IF_ERROR(CheckPayload(labels, 8, count, labels_path));

  Dataset data;
  data.features.resize(count, static_cast<int64_t>(dim));
  data.labels.resize(count);
  const uint8_t* pixels = images.data() + 16;
  for (int64_t i = 0; i < static_cast<int64_t>(count); ++i) {
    for (int64_t j = 0; j < static_cast<int64_t>(dim); ++j) {
      data.features(i, j) = pixels[i * dim + j] / 255.0;
    }
    auto row = data.features.row(i);
    internal::ProjectOntoBall(row, 1.0);
    data.labels(i) = labels[8 + i];
  }
  data.feature_norm_bound = 1.0;
  data.label_bound =
      count == 0 ? 0.0 : data.labels.cwiseAbs().maxCoeff();
  return data;
}

Dataset BinarizeDigits(const Dataset& data, const std::vector<int>& positive) {
  Dataset out = data;
  for (int64_t i = 0; i < out.size(); ++i) {
    const int digit = static_cast<int>(data.labels(i));
    out.labels(i) =
        std::find(positive.begin(), positive.end(), digit) != positive.end()
            ? 1.0
            : -1.0;
  }
  out.label_bound = 1.0;
  return out;
}

}  // namespace dpnc
