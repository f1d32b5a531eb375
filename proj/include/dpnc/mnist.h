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


// MNIST in the IDX container: big-endian 32-bit header words followed by
// unsigned bytes. Images carry magic 2051 and (count, rows, cols); labels
// carry magic 2049 and (count).

#ifndef DPNC_MNIST_H_
#define DPNC_MNIST_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpnc/synthetic_data.h"

namespace dpnc {

inline constexpr uint32_t kIdxImageMagic = 2051;
inline constexpr uint32_t kIdxLabelMagic = 2049;

// Error codes: bad magic -> InvalidArgument, truncated -> OutOfRange,
// image/label count mismatch -> FailedPrecondition, missing file -> NotFound.
//
// Pixels are scaled to [0, 1] and each image by 1/max(1, |x|_2). Labels are
// the raw digits.
absl::StatusOr<Dataset> LoadMnistIdx(const std::string& images_path,
                                     const std::string& labels_path);

// Maps digit labels to +1 when listed in `positive`, -1 otherwise.
Dataset BinarizeDigits(const Dataset& data, const std::vector<int>& positive);

}  // namespace dpnc

#endif  // DPNC_MNIST_H_
