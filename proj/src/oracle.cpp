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

#include "mgmcast/oracle.hpp"

#include <cmath>
#include <limits>

namespace mgmcast::oracle {

EnumerationResult enumerate_active_sets(const HalfSpaceSet& hs,
                                        const OracleBudget& budget) {
  hs.validate();
  const int k_count = hs.size();
  const int n = hs.dim();
  if (n > budget.max_dim || k_count > budget.max_constraints)
    throw BudgetError("enumerate_active_sets: instance exceeds oracle budget");

  double scale = 1.0;
  for (double b : hs.offsets) scale = std::max(scale, std::abs(b));
  const double tol = 1e-9 * scale;

  Eigen::MatrixXd gram(k_count, k_count);
  for (int r = 0; r < k_count; ++r)
    for (int s = r; s < k_count; ++s) {
      gram(r, s) = hs.normals[r].dot(hs.normals[s]).real();
      gram(s, r) = gram(r, s);
    }

  EnumerationResult best;
  best.objective = std::numeric_limits<double>::infinity();

  for (unsigned mask = 0; mask < (1u << k_count); ++mask) {
    std::vector<int> active;
    for (int k = 0; k < k_count; ++k)
      if (mask & (1u << k)) active.push_back(k);
    const int m = static_cast<int>(active.size());

    CVector c = CVector::Zero(n);
    Eigen::VectorXd lam;
    if (m > 0) {
      Eigen::MatrixXd m_s(m, m);
      Eigen::VectorXd rhs(m);
      for (int r = 0; r < m; ++r) {
        rhs[r] = 0.5 * hs.offsets[active[r]];
        for (int s = 0; s < m; ++s) m_s(r, s) = gram(active[r], active[s]);
      }
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m_s);
      lam = cod.solve(rhs);
      lam += cod.solve(rhs - m_s * lam);
      if ((m_s * lam - rhs).cwiseAbs().maxCoeff() > tol) continue;  // inconsistent
      bool dual_ok = true;
      for (int r = 0; r < m; ++r)
        if (lam[r] < -1e-9 * std::max(1.0, lam.cwiseAbs().maxCoeff())) dual_ok = false;
      if (!dual_ok) continue;
      for (int r = 0; r < m; ++r) c += lam[r] * hs.normals[active[r]];
    }

    bool feasible = true;
    for (int k = 0; k < k_count; ++k)
      if (2.0 * hs.normals[k].dot(c).real() < hs.offsets[k] - tol) feasible = false;
    if (!feasible) continue;

    const double obj = c.squaredNorm();
    if (obj < best.objective) {
      best.feasible = true;
      best.point = c;
      best.objective = obj;
    }
  }
  if (!best.feasible) best.objective = 0.0;
  return best;
}

GridAlphaResult grid_min_alpha(const CVector& gbar, const CVector& dir,
                               const CVector& c_prev, double eta, int grid_points) {
  if (grid_points < 2 || grid_points > 4096)
    throw BudgetError("grid_min_alpha: grid size out of budget");
  const cxd gd = gbar.dot(dir);
  const cxd gc = gbar.dot(c_prev);
  if (std::norm(gd) < 1e-12 * gbar.squaredNorm())
    throw DegenerateError("grid_min_alpha: direction orthogonal to channel");

  // Along the best phase, |alpha| <= (sqrt(eta) + |g^H c|)/|g^H d| suffices.
  const double bound = (std::sqrt(eta) + std::abs(gc)) / std::abs(gd);
  const double dm = bound / grid_points;

  GridAlphaResult out;
  out.resolution = dm;
  double best_mag = std::numeric_limits<double>::infinity();
  for (int mi = 0; mi <= grid_points; ++mi) {
    const double mag = mi * dm;
    if (mag >= best_mag) break;  // magnitudes scan upward
    for (int pi = 0; pi < grid_points; ++pi) {
      const double phase = 2.0 * M_PI * pi / grid_points;
      const cxd alpha = std::polar(mag, phase);
      if (std::norm(gc + alpha * gd) >= eta) {
        best_mag = mag;
        out.alpha = alpha;
        break;
      }
    }
  }
  if (!std::isfinite(best_mag))
    throw DegenerateError("grid_min_alpha: no feasible step within grid bound");
  return out;
}

double grid_qos_single_group(const CMatrix& effective, const Eigen::VectorXd& eta,
                             int grid_points) {
  const int n = static_cast<int>(effective.rows());
  const int k_count = static_cast<int>(effective.cols());
  if (n < 1 || n > 2 || k_count < 1 || k_count > 2)
    throw BudgetError("grid_qos_single_group: instance exceeds oracle budget");
  if (grid_points < 4 || grid_points > 512)
    throw BudgetError("grid_qos_single_group: grid size out of budget");

  // Feasible reference: sum of normalized channels rescaled to the most
  // violated constraint; bounds the coordinate magnitudes of the optimum.
  CVector ref = CVector::Zero(n);
  for (int k = 0; k < k_count; ++k) ref += effective.col(k) / effective.col(k).norm();
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_count; ++k)
    worst = std::min(worst, std::norm(effective.col(k).dot(ref)) / eta[k]);
  if (!(worst > 0.0)) {
    ref = effective.col(0);
    if (k_count > 1) ref += effective.col(k_count - 1);
    worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < k_count; ++k)
      worst = std::min(worst, std::norm(effective.col(k).dot(ref)) / eta[k]);
    if (!(worst > 0.0))
      throw DegenerateError("grid_qos_single_group: no reference direction");
  }
  const double p_ref = ref.squaredNorm() / worst;
  const double mag_bound = std::sqrt(p_ref);

  const int m = grid_points;
  double best = p_ref;
  auto feasible = [&](const CVector& c) {
    for (int k = 0; k < k_count; ++k)
      if (std::norm(effective.col(k).dot(c)) < eta[k]) return false;
    return true;
  };

  CVector c(n);
  if (n == 1) {
    for (int m0 = 0; m0 <= m; ++m0) {
      c[0] = m0 * mag_bound / m;  // global phase fixed: coordinate 0 real
      const double p = c.squaredNorm();
      if (p >= best) break;
      if (feasible(c)) best = p;
    }
  } else {
    for (int m0 = 0; m0 <= m; ++m0) {
      const double a0 = m0 * mag_bound / m;
      for (int m1 = 0; m1 <= m; ++m1) {
        const double a1 = m1 * mag_bound / m;
        const double p = a0 * a0 + a1 * a1;
        if (p >= best) continue;
        for (int pi = 0; pi < m; ++pi) {
          c[0] = a0;
          c[1] = std::polar(a1, 2.0 * M_PI * pi / m);
          if (feasible(c)) {
            best = p;
            break;
          }
        }
      }
    }
  }
  return best;
}

}  // namespace mgmcast::oracle
