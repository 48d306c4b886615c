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

#ifndef MGMCAST_ORACLE_HPP
#define MGMCAST_ORACLE_HPP

#include "mgmcast/qp_kernel.hpp"
#include "mgmcast/types.hpp"

// Brute-force reference solvers for tests and acceptance runs. Exact (or
// grid-converging) on small instances, never part of the solve path, and
// consuming nothing but problem data and solver outputs.
namespace mgmcast::oracle {

struct OracleBudget {
  int max_dim = 6;
  int max_constraints = 6;
  int grid_points = 64;
};

struct EnumerationResult {
  bool feasible = false;
  CVector point;
  double objective = 0.0;
};

/// Exact minimum-norm point by enumerating every subset of constraints as a
/// candidate active set, solving the equality-constrained system, and
/// filtering by primal feasibility and dual nonnegativity. Exact up to
/// linear-algebra roundoff. Throws BudgetError beyond the budget.
EnumerationResult enumerate_active_sets(const HalfSpaceSet& halfspaces,
                                        const OracleBudget& budget = {});

/// 2-D grid search (magnitude x phase) for the minimum-magnitude step alpha
/// with |gbar^H (c_prev + alpha d)|^2 >= eta. Returns the best grid point;
/// the magnitude resolution is bound/grid_points (see implementation).
struct GridAlphaResult {
  cxd alpha;
  double resolution = 0.0;
};
GridAlphaResult grid_min_alpha(const CVector& gbar, const CVector& dir,
                               const CVector& c_prev, double eta,
                               int grid_points = 64);

/// Near-optimal power of a single-group QoS instance (dim <= 2, <= 2 UEs)
/// by gridding each coordinate over magnitude and phase (global phase
/// fixed). Returns the best feasible power found: an anytime upper bound on
/// the optimum that converges with grid density.
double grid_qos_single_group(const CMatrix& effective, const Eigen::VectorXd& eta,
                             int grid_points = 64);

}  // namespace mgmcast::oracle

#endif  // MGMCAST_ORACLE_HPP
