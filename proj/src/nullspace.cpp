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

#include "mgmcast/nullspace.hpp"

#include <Eigen/QR>
#include <cmath>

namespace mgmcast {

OuterLayer compute_outer_layer(const ChannelSet& channels) {
  channels.validate();
  const int g_count = channels.num_groups();
  const int n = channels.n_antennas();
  const int k_total = channels.total_users();

  OuterLayer outer;
  outer.bases.resize(g_count);
  outer.effective.resize(g_count);

  for (int j = 0; j < g_count; ++j) {
    const int kj = channels.group_size(j);
    const int tau = k_total - kj;
    if (tau == 0) {
      outer.bases[j] = CMatrix::Identity(n, n);
    } else {
      if (n <= tau)
        throw std::invalid_argument("outer layer: need N > K - K_j");
      CMatrix stacked(n, tau);
      int col = 0;
      for (int i = 0; i < g_count; ++i) {
        if (i == j) continue;
        stacked.middleCols(col, channels.group_size(i)) = channels.groups[i];
        col += channels.group_size(i);
      }
      Eigen::HouseholderQR<CMatrix> qr(stacked);
      const CMatrix& qr_packed = qr.matrixQR();
      double max_diag = 0.0;
      for (int d = 0; d < tau; ++d) max_diag = std::max(max_diag, std::abs(qr_packed(d, d)));
      for (int d = 0; d < tau; ++d)
        if (std::abs(qr_packed(d, d)) <= 1e-10 * max_diag)
          throw DegenerateError("outer layer: stacked channels are rank deficient");
      CMatrix q_full = qr.householderQ() * CMatrix::Identity(n, n);
      outer.bases[j] = q_full.rightCols(n - tau);
    }

    CMatrix eff(n - tau, kj);
    for (int k = 0; k < kj; ++k) {
      const double sigma = std::sqrt(channels.noise_powers[j][k]);
      eff.col(k) = outer.bases[j].adjoint() * channels.groups[j].col(k) / sigma;
    }
    outer.effective[j] = std::move(eff);
  }
  return outer;
}

Precoder compose(const OuterLayer& outer, std::vector<CVector> inner) {
  const int g_count = outer.num_groups();
  if (static_cast<int>(inner.size()) != g_count)
    throw std::invalid_argument("compose: group count mismatch");
  Precoder p;
  p.composite.resize(g_count);
  for (int j = 0; j < g_count; ++j) {
    if (inner[j].size() != outer.bases[j].cols())
      throw std::invalid_argument("compose: inner vector dimension mismatch");
    p.composite[j] = outer.bases[j] * inner[j];
  }
  p.inner = std::move(inner);
  return p;
}

long long flop_estimate_bdzf(int n_antennas, const std::vector<int>& group_sizes) {
  long long k_total = 0;
  for (int kj : group_sizes) k_total += kj;
  long double sum_sq = 0.0L, sum_cube = 0.0L;
  for (int kj : group_sizes) {
    const long double tau = static_cast<long double>(k_total - kj);
    sum_sq += tau * tau;
    sum_cube += tau * tau * tau;
  }
  return llroundl(8.0L * n_antennas * sum_sq - (8.0L / 3.0L) * sum_cube);
}

}  // namespace mgmcast
