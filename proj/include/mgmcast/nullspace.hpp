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

#ifndef MGMCAST_NULLSPACE_HPP
#define MGMCAST_NULLSPACE_HPP

#include <vector>

#include "mgmcast/types.hpp"

namespace mgmcast {

/// Builds the interference-nulling outer layer. For each group j the
/// stacked other-group channels G_{-j} (N x tau_j) are factored by
/// Householder QR; the trailing N - tau_j columns of the full Q form the
/// isometric basis F_j with G_{-j}^H F_j = 0. Effective channels are
/// gbar_jk = (1/sigma_jk) F_j^H g_jk. Throws DegenerateError when G_{-j}
/// is numerically rank-deficient (|R_ii| <= 1e-10 max |R_ii|).
OuterLayer compute_outer_layer(const ChannelSet& channels);

/// w_j = F_j c_j for every group; returns a Precoder carrying both layers.
Precoder compose(const OuterLayer& outer, std::vector<CVector> inner);

/// Closed-form flop count of the QR-based outer layer:
/// 8 N sum_j (K - K_j)^2 - 8/3 sum_j (K - K_j)^3, rounded to nearest.
long long flop_estimate_bdzf(int n_antennas, const std::vector<int>& group_sizes);

}  // namespace mgmcast

#endif  // MGMCAST_NULLSPACE_HPP
