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

#ifndef MGMCAST_HEURISTIC_HPP
#define MGMCAST_HEURISTIC_HPP

#include <vector>

#include "mgmcast/types.hpp"

namespace mgmcast {

/// How the users of a group are ranked before the successive construction.
enum class OrderingPolicy {
  // Greedy argmin of provided/requested SNR: serves cheap users first.
  kBestFirstRef12,
  // Greedy argmax of the incremental power a candidate would need now,
  // each candidate along its own residual direction.
  kWorstFirstPower,
  // Descending eta / ||gbar||^2: the large-N shortcut of the power rule.
  kWorstFirstRatio,
};

/// Counts arithmetic work actually performed (8 flops per complex
/// multiply-add pair), for the linear-complexity measurements.
struct FlopCounter {
  long long flops = 0;
  void add(long long f) { flops += f; }
};

/// Serving order for one group. kWorstFirstRatio ties break by ascending
/// user index; the greedy policies simulate the successive construction.
std::vector<int> order_users(const CMatrix& effective, const Eigen::VectorXd& eta,
                             OrderingPolicy policy, FlopCounter* fc = nullptr);

/// Minimum-magnitude step alpha such that c_prev + alpha * dir meets
/// |gbar^H c|^2 = eta: the phase cancels arg(gbar^H dir * c_prev^H gbar)
/// and the magnitude is the positive root of the induced real quadratic.
/// Returns 0 when c_prev already satisfies the constraint. Throws
/// DegenerateError when dir is (numerically) orthogonal to gbar.
cxd alpha_step(const CVector& gbar, const CVector& dir, const CVector& c_prev,
               double eta);

/// Successive construction: serve users in the given order, each along the
/// unit Gram-Schmidt residual of its channel against the previously ordered
/// channels, with the minimal step meeting its SNR target. Earlier users'
/// SNRs are untouched by later steps (orthogonality by construction).
CVector successive_precoder(const CMatrix& effective, const Eigen::VectorXd& eta,
                            const std::vector<int>& order, FlopCounter* fc = nullptr);

struct HeuristicQosResult {
  Precoder precoder;
  SolveReport report;
};

/// Order + successive construction per group over the null-space effective
/// channels; the composite precoder satisfies every SINR target.
HeuristicQosResult heuristic_qos(const ChannelSet& channels,
                                 const std::vector<Eigen::VectorXd>& eta,
                                 OrderingPolicy policy = OrderingPolicy::kWorstFirstRatio,
                                 FlopCounter* fc = nullptr);

struct HeuristicMmfResult {
  Precoder precoder;
  double t = 0.0;
  SolveReport report;
};

/// Max-min solution from the QoS one: scale the QoS answer to spend the
/// whole budget; the attained objective is (P / P_heu) * lambda with lambda
/// the recomputed min weighted SNR of the QoS answer (lambda >= 1).
HeuristicMmfResult heuristic_mmf(const ChannelSet& channels,
                                 const std::vector<Eigen::VectorXd>& eta,
                                 double power_budget,
                                 OrderingPolicy policy = OrderingPolicy::kWorstFirstRatio);

/// Closed-form flop model of the successive inner layer, summed over groups
/// with n_j = N - tau_j:
///   ordering    4 K_j n_j + K_j ceil(log2 K_j)
///   Gram-Schmidt 8 n_j K_j^2 - 8/3 K_j^3
///   first user  2 (n_j + 1)
///   steps       24 (K_j - 1) n_j
long long flop_estimate_alg3(int n_antennas, const std::vector<int>& group_sizes);

}  // namespace mgmcast

#endif  // MGMCAST_HEURISTIC_HPP
