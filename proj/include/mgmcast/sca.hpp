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

#ifndef MGMCAST_SCA_HPP
#define MGMCAST_SCA_HPP

#include <cstdint>
#include <vector>

#include "mgmcast/qp_kernel.hpp"
#include "mgmcast/types.hpp"

namespace mgmcast {

enum class InitPolicy {
  kGroupChannelSum,  // z_j proportional to sum_k gbar_jk / ||gbar_jk||
  kRandom,           // complex Gaussian from ScaOptions::random_seed
  kWarmStart,        // ScaOptions::warm_start_inner
};

struct ScaOptions {
  double rel_tol = 1e-3;  // |eps(k+1) - eps(k)| / eps(k) threshold
  int max_iters = 100;
  InitPolicy init_policy = InitPolicy::kGroupChannelSum;
  std::uint64_t random_seed = 0;
  std::vector<CVector> warm_start_inner;
};

struct HalfSpace {
  CVector a;
  double b = 0.0;
};

/// Convexification of the rank-one constraint c^H X c >= eta (X = gbar
/// gbar^H) around z: since (c - z)^H X (c - z) >= 0,
///   2 Re(z^H X c) - z^H X z >= eta
/// is a tighter convex constraint. Returns a = X z = gbar (gbar^H z) and
/// b = eta + |gbar^H z|^2, read as 2 Re(a^H c) >= b.
HalfSpace linearize(const CVector& z, const CVector& gbar, double eta);

struct ScaQosResult {
  Precoder precoder;
  std::vector<SolveReport> reports;  // one per group
  // Whole-problem view: the trace is the total power summed across groups
  // (converged groups hold their final value), and iterations is the first
  // index where that total meets the relative-change condition. This is the
  // measurement convention behind the reported iteration counts.
  SolveReport combined;
};

/// Power-minimizing inner layers under per-UE SNR targets: per group,
/// iterate minimum-norm solves of the linearized constraint set, updating
/// the expansion point until the per-group power stabilizes. Every iterate
/// is feasible for the true constraints; the objective trace is
/// non-increasing. The initial point is rescaled so the most violated
/// target holds with equality.
ScaQosResult qos_bdzf_sca(const ChannelSet& channels,
                          const std::vector<Eigen::VectorXd>& eta,
                          const ScaOptions& options = {});

struct ScaMmfResult {
  Precoder precoder;
  double t = 0.0;  // min_jk SNR_jk / eta_jk of the returned precoder
  SolveReport report;
};

/// Max-min weighted SNR under a total power budget: iterate the linearized
/// max-min ball subproblem, updating the expansion point each round. The
/// objective trace is non-decreasing and the returned precoder uses at most
/// the budget.
ScaMmfResult mmf_bdzf_sca(const ChannelSet& channels,
                          const std::vector<Eigen::VectorXd>& eta,
                          double power_budget, const ScaOptions& options = {});

/// w_j = F_j c_j composition cost: 8 G N^2 - 8 (G-1) K N flops.
long long sca_composition_flops(int n_antennas, int num_groups, int total_users);

/// Outer layer + iterations * kScaSolveFlopsPerDim3 * sum_j (N - tau_j)^3 +
/// composition. The per-iteration constant is an artifact parameter (the
/// dense convex solve is cubic in the reduced dimension).
long long flop_estimate_sca(int n_antennas, const std::vector<int>& group_sizes,
                            int iterations);

inline constexpr int kScaSolveFlopsPerDim3 = 16;

}  // namespace mgmcast

#endif  // MGMCAST_SCA_HPP
