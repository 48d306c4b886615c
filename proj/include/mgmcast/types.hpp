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

#ifndef MGMCAST_TYPES_HPP
#define MGMCAST_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgmcast {

using cxd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Thrown when a channel configuration is numerically degenerate
/// (rank-deficient stacked channels, zero effective channels, vanishing
/// Gram-Schmidt residuals, ...).
class DegenerateError : public std::runtime_error {
 public:
  explicit DegenerateError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when a convex subproblem has an empty constraint set.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown by the brute-force verifiers when an instance exceeds their
/// enumeration/grid budget.
class BudgetError : public std::invalid_argument {
 public:
  explicit BudgetError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Base-station and cell configuration. G groups of K_j users each are
/// served by an N-antenna array; tau_j = K - K_j spatial dimensions per
/// group are sacrificed to interference nulling.
struct SystemConfig {
  int n_antennas = 80;
  std::vector<int> group_sizes = {10, 10, 10};
  double cell_radius_m = 900.0;
  double exclusion_radius_m = 100.0;
  double noise_psd_dbm_hz = -174.0;
  double bandwidth_hz = 20e6;
  std::uint64_t master_seed = 1;
  // When >= 0, overrides the PSD x bandwidth noise power (watts, all UEs).
  double noise_override_w = -1.0;

  int num_groups() const { return static_cast<int>(group_sizes.size()); }
  int total_users() const;
  int min_group_size() const;

  // Throws std::invalid_argument when any structural invariant is violated.
  void validate() const;
};

/// Per-group channel matrices (columns are per-UE channel vectors) plus
/// per-UE noise powers and large-scale fading coefficients, all linear scale.
struct ChannelSet {
  std::vector<CMatrix> groups;                  // N x K_j, column k is g_jk
  std::vector<Eigen::VectorXd> noise_powers;    // sigma_jk^2 [W]
  std::vector<Eigen::VectorXd> large_scale;     // beta_jk

  int num_groups() const { return static_cast<int>(groups.size()); }
  int n_antennas() const { return groups.empty() ? 0 : static_cast<int>(groups[0].rows()); }
  int group_size(int j) const { return static_cast<int>(groups[j].cols()); }
  int total_users() const;

  void validate() const;
};

/// Null-space outer layer. bases[j] is the isometric N x (N - tau_j) matrix
/// F_j whose columns span the orthogonal complement of all other groups'
/// channels; effective[j] has columns (1/sigma_jk) F_j^H g_jk, so inner-layer
/// constraints |gbar^H c|^2 >= eta are SNR constraints.
struct OuterLayer {
  std::vector<CMatrix> bases;
  std::vector<CMatrix> effective;

  int num_groups() const { return static_cast<int>(bases.size()); }
};

/// Two-layer precoder. inner[j] lives in the reduced dimension N - tau_j;
/// composite[j] = F_j inner[j] is the full-dimension beamforming vector.
/// composite may be left empty when only the inner layer is of interest.
struct Precoder {
  std::vector<CVector> inner;
  std::vector<CVector> composite;

  bool has_composite() const { return !composite.empty(); }
  int num_groups() const {
    return static_cast<int>(inner.empty() ? composite.size() : inner.size());
  }
};

/// Per-solve diagnostics shared by the iterative solvers.
struct SolveReport {
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;
  double max_constraint_violation = 0.0;
  long long flops_estimate = 0;
  bool converged = false;
};

}  // namespace mgmcast

#endif  // MGMCAST_TYPES_HPP
