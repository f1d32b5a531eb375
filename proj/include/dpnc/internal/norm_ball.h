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


#ifndef DPNC_INTERNAL_NORM_BALL_H_
#define DPNC_INTERNAL_NORM_BALL_H_

#include <cmath>

#include "Eigen/Dense"

namespace dpnc::internal {

// Scales v onto {|v|_2 <= radius}. The factor is nudged down until the
// rounded result satisfies the cap, so projecting twice changes nothing.
template <typename Derived>
void ProjectOntoBall(Eigen::MatrixBase<Derived>& v, double radius) {
  const double norm = v.norm();
  if (!(norm > radius)) return;
  double s = radius / norm;
  while ((s * v).norm() > radius) s = std::nextafter(s, 0.0);
  v *= s;
}

}  // namespace dpnc::internal

#endif  // DPNC_INTERNAL_NORM_BALL_H_
