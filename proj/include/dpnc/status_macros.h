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

#ifndef DPNC_STATUS_MACROS_H_
#define DPNC_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define DPNC_RETURN_IF_ERROR(expr)             \
  do {                                         \
    const absl::Status _dpnc_status = (expr);  \
    if (!_dpnc_status.ok()) return _dpnc_status; \
  } while (0)

#define DPNC_CONCAT_INNER_(a, b) a##b
#define DPNC_CONCAT_(a, b) DPNC_CONCAT_INNER_(a, b)

#define DPNC_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                \
  if (!statusor.ok()) return statusor.status();           \
  lhs = std::move(*statusor)

#define DPNC_ASSIGN_OR_RETURN(lhs, rexpr) \
  DPNC_ASSIGN_OR_RETURN_IMPL_(DPNC_CONCAT_(_dpnc_statusor_, __LINE__), lhs, rexpr)

#endif  // DPNC_STATUS_MACROS_H_
