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


// Versioned JSON checkpoints for network parameters:
//   {"version": 1, "L": .., "m": .., "d": .., "layers": [[row-major], ...]}
// Finite doubles round-trip bit for bit.

#ifndef DPNC_MLP_CHECKPOINT_H_
#define DPNC_MLP_CHECKPOINT_H_

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpnc/mlp.h"

namespace dpnc {

inline constexpr int kCheckpointVersion = 1;

absl::StatusOr<std::string> CheckpointToJson(const MlpParams& params);
absl::StatusOr<MlpParams> CheckpointFromJson(const std::string& text);

absl::Status WriteCheckpoint(const MlpParams& params, const std::string& path);
absl::StatusOr<MlpParams> ReadCheckpoint(const std::string& path);

}  // namespace dpnc

#endif  // DPNC_MLP_CHECKPOINT_H_
