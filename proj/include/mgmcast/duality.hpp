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

#ifndef MGMCAST_DUALITY_HPP
#define MGMCAST_DUALITY_HPP

#include <functional>
#include <vector>

#include "mgmcast/types.hpp"

// Closed-form conversions between the power-minimization and max-min
// problems over the null-space effective channels. Both directions are pure
// power rescalings; everything here recomputes achieved values from the
// precoding vectors instead of trusting upstream reports.
namespace mgmcast {

struct QosSolution {
  Precoder precoder;             // inner vectors required
  double power = 0.0;            // total inner power
  double min_weighted_snr = 0.0; // lambda = min_jk |gbar^H c_j|^2 / eta_jk, >= 1 when feasible
};

struct MmfSolution {
  Precoder precoder;
  double budget = 0.0;
  double objective = 0.0;  // t = min_jk |gbar^H c_j|^2 / eta_jk
};

/// min_jk |gbar_jk^H c_j|^2 / eta_jk of a set of inner vectors.
double min_weighted_snr(const std::vector<CVector>& inner,
                        const std::vector<CMatrix>& effective,
                        const std::vector<Eigen::VectorXd>& eta);

/// Scales each group's vector so its most violated SNR target holds with
/// equality: afterwards min_k |gbar^H c|^2 / eta_k = 1 per group. Invariant
/// to the input scale. Throws DegenerateError on a zero inner product.
std::vector<CVector> rescale_to_feasible(std::vector<CVector> inner,
                                         const std::vector<CMatrix>& effective,
                                         const std::vector<Eigen::VectorXd>& eta);

/// QoS answer -> max-min answer for budget P: c -> sqrt(P / P_app) c with
/// P_app the answer's power; the attained objective is exactly
/// (P / P_app) * lambda >= P / P_app (lambda recomputed, >= 1 required).
MmfSolution qos_to_mmf(const QosSolution& sol, const std::vector<CMatrix>& effective,
                       const std::vector<Eigen::VectorXd>& eta, double budget);

/// Max-min answer -> QoS answer: c -> c / sqrt(t) with t the recomputed
/// objective (> 0 required); the resulting power is (used power) / t
/// <= P / t and every SNR target is met.
QosSolution mmf_to_qos(const MmfSolution& sol, const std::vector<CMatrix>& effective,
                       const std::vector<Eigen::VectorXd>& eta);

/// A QoS solver under test: channels + per-group targets -> inner vectors.
using QosSolverFn = std::function<std::vector<CVector>(
    const ChannelSet&, const std::vector<Eigen::VectorXd>&)>;

struct ScalingLawReport {
  double power_deviation = 0.0;     // | P(alpha eta)/P(eta) - alpha | / alpha
  double precoder_deviation = 0.0;  // relative l2 gap to sqrt(alpha) * c(eta)
};

/// Runs the solver on eta and on alpha*eta and reports how far the outputs
/// are from the exact scaling law P -> alpha P, c -> sqrt(alpha) c.
ScalingLawReport check_scaling_law(const QosSolverFn& solver,
                                   const ChannelSet& channels,
                                   const std::vector<Eigen::VectorXd>& eta,
                                   double alpha);

}  // namespace mgmcast

#endif  // MGMCAST_DUALITY_HPP
