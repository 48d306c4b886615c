// SPDX-License-Identifier: Apache-2.0
//
// mgmcast: multigroup multicast precoding for large-scale antenna arrays
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MGMCAST_QP_KERNEL_HPP
#define MGMCAST_QP_KERNEL_HPP

#include <utility>
#include <vector>

#include "mgmcast/types.hpp"

namespace mgmcast {

/// Intersection of real half-spaces on a complex vector:
///   2 Re(a_k^H c) >= b_k  for every k.
struct HalfSpaceSet {
  std::vector<CVector> normals;  // a_k, all nonzero, common dimension
  std::vector<double> offsets;   // b_k

  int size() const { return static_cast<int>(normals.size()); }
  int dim() const { return normals.empty() ? 0 : static_cast<int>(normals[0].size()); }
  void validate() const;
};

struct MinNormResult {
  CVector point;
  double objective = 0.0;      // ||point||^2
  double kkt_residual = 0.0;   // scale-normalized max of primal violation and
                               // complementary slackness (stationarity is exact:
                               // point = sum_k lambda_k a_k by construction)
  Eigen::VectorXd multipliers; // lambda >= 0
  int sweeps = 0;
};

/// Minimum-norm point of a half-space intersection:
///   min ||c||^2  s.t.  2 Re(a_k^H c) >= b_k.
/// Dual coordinate ascent (Hildreth) on the nonnegative multipliers,
/// followed by an exact active-set refinement for instances with
/// dim * constraints below a fixed threshold. Throws InfeasibleError when
/// no point satisfies the constraints within tolerance.
MinNormResult min_norm(const HalfSpaceSet& halfspaces,
                       const Eigen::VectorXd* warm_duals = nullptr);

/// One linear term of the max-min problem below, attached to group `group`:
///   (2 Re(a^H c_group) - q) / weight >= t.
struct MaxMinTerm {
  int group = 0;
  CVector a;
  double q = 0.0;
  double weight = 1.0;
};

struct MaxMinResult {
  std::vector<CVector> points;  // c_1 .. c_G
  double t = 0.0;               // attained min ratio of the returned points
  int probes = 0;
  // (level, minimal power) for every feasibility probe; the minimal power
  // is nondecreasing in the level.
  std::vector<std::pair<double, double>> probe_trace;
};

/// Maximizes t subject to (2 Re(a_jk^H c_j) - q_jk)/weight_jk >= t for all
/// terms and sum_j ||c_j||^2 <= power_budget. Bisection on t: the minimal
/// power to reach a level t is the sum of independent per-group min_norm
/// problems and is nondecreasing in t. The returned points are rescaled so
/// the power budget binds whenever that does not lower the attained ratio;
/// the returned t is recomputed from the returned points and lies within
/// 1e-4 |t| + 1e-8 of the subproblem optimum.
MaxMinResult max_min_ball(const std::vector<MaxMinTerm>& terms, int num_groups,
                          double power_budget);

}  // namespace mgmcast

#endif  // MGMCAST_QP_KERNEL_HPP
