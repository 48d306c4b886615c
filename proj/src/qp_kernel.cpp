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

#include "mgmcast/qp_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mgmcast {

namespace {

constexpr int kMaxHildrethSweeps = 10000;
constexpr int kMaxBisectionSteps = 60;
// Exact active-set refinement is attempted when dim * constraints stays
// below this; larger instances keep the iterative answer.
constexpr long long kRefineThreshold = 1LL << 22;

double offset_scale(const std::vector<double>& offsets) {
  double s = 1.0;
  for (double b : offsets) s = std::max(s, std::abs(b));
  return s;
}

// Equality-constrained minimum norm on an active set: c = A_S lambda_S with
// Re(A_S^H A_S) lambda_S = b_S / 2. Returns false when the system is
// inconsistent (conflicting equality constraints).
bool solve_active_set(const HalfSpaceSet& hs, const Eigen::MatrixXd& gram,
                      const std::vector<int>& active, CVector& c,
                      Eigen::VectorXd& lambda_active) {
  const int m = static_cast<int>(active.size());
  if (m == 0) {
    c.setZero();
    lambda_active.resize(0);
    return true;
  }
  Eigen::MatrixXd m_s(m, m);
  Eigen::VectorXd rhs(m);
  for (int r = 0; r < m; ++r) {
    rhs[r] = 0.5 * hs.offsets[active[r]];
    for (int s = 0; s < m; ++s) m_s(r, s) = gram(active[r], active[s]);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m_s);
  lambda_active = cod.solve(rhs);
  // One step of iterative refinement sharpens the absolute tolerance.
  lambda_active += cod.solve(rhs - m_s * lambda_active);
  const double resid = (m_s * lambda_active - rhs).cwiseAbs().maxCoeff();
  const double rhs_scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  if (resid > 1e-8 * rhs_scale) return false;
  c.setZero();
  for (int r = 0; r < m; ++r) c += lambda_active[r] * hs.normals[active[r]];
  return true;
}

}  // namespace

void HalfSpaceSet::validate() const {
  if (normals.size() != offsets.size())
    throw std::invalid_argument("halfspaces: normals/offsets length mismatch");
  for (const auto& a : normals) {
    if (a.size() != dim())
      throw std::invalid_argument("halfspaces: inconsistent dimensions");
    if (a.squaredNorm() == 0.0)
      throw std::invalid_argument("halfspaces: zero normal vector");
  }
}

MinNormResult min_norm(const HalfSpaceSet& hs, const Eigen::VectorXd* warm_duals) {
  hs.validate();
  const int k_count = hs.size();
  const int n = hs.dim();
  const double scale = offset_scale(hs.offsets);
  const double eps_primal = 1e-10 * scale;

  Eigen::VectorXd norms2(k_count);
  for (int k = 0; k < k_count; ++k) norms2[k] = hs.normals[k].squaredNorm();

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k_count);
  CVector c = CVector::Zero(n);
  if (warm_duals && warm_duals->size() == k_count) {
    lambda = warm_duals->cwiseMax(0.0);
    for (int k = 0; k < k_count; ++k)
      if (lambda[k] != 0.0) c += lambda[k] * hs.normals[k];
  }

  // Hildreth dual coordinate ascent.
  int sweeps = 0;
  double max_viol = std::numeric_limits<double>::infinity();
  for (; sweeps < kMaxHildrethSweeps; ++sweeps) {
    double sweep_move = 0.0;
    max_viol = 0.0;
    for (int k = 0; k < k_count; ++k) {
      const double r = hs.offsets[k] - 2.0 * hs.normals[k].dot(c).real();
      max_viol = std::max(max_viol, r);
      const double delta = std::max(-lambda[k], r / (2.0 * norms2[k]));
      if (delta != 0.0) {
        lambda[k] += delta;
        c += delta * hs.normals[k];
        sweep_move = std::max(sweep_move, std::abs(delta) * std::sqrt(norms2[k]));
      }
    }
    if (max_viol <= eps_primal) break;
    if (sweep_move <= 1e-14 * std::max(1.0, c.norm())) break;
  }

  // Exact refinement: active-set iteration seeded with the Hildreth duals.
  if (static_cast<long long>(n) * k_count <= kRefineThreshold) {
    Eigen::MatrixXd gram(k_count, k_count);
    for (int r = 0; r < k_count; ++r)
      for (int s = r; s < k_count; ++s) {
        gram(r, s) = hs.normals[r].dot(hs.normals[s]).real();
        gram(s, r) = gram(r, s);
      }

    std::vector<int> active;
    const double lambda_floor = 1e-12 * std::max(1.0, lambda.maxCoeff());
    for (int k = 0; k < k_count; ++k)
      if (lambda[k] > lambda_floor) active.push_back(k);

    CVector c_ref = c;
    Eigen::VectorXd lam_ref;
    const int max_as_iters = 3 * k_count + 16;
    bool ok = false;
    for (int it = 0; it < max_as_iters; ++it) {
      if (!solve_active_set(hs, gram, active, c_ref, lam_ref)) {
        // Inconsistent equality system: retreat to the iterative answer.
        break;
      }
      // Drop the most negative multiplier, if any.
      int drop = -1;
      const double lam_scale =
          active.empty() ? 1.0 : std::max(1e-300, lam_ref.cwiseAbs().maxCoeff());
      double most_neg = -1e-10 * lam_scale;
      for (int r = 0; r < static_cast<int>(active.size()); ++r)
        if (lam_ref[r] < most_neg) {
          most_neg = lam_ref[r];
          drop = r;
        }
      if (drop >= 0) {
        active.erase(active.begin() + drop);
        continue;
      }
      // Add the most violated inactive constraint, if any.
      int add = -1;
      double worst = 1e-10 * scale;
      for (int k = 0; k < k_count; ++k) {
        if (std::find(active.begin(), active.end(), k) != active.end()) continue;
        const double r = hs.offsets[k] - 2.0 * hs.normals[k].dot(c_ref).real();
        if (r > worst) {
          worst = r;
          add = k;
        }
      }
      if (add >= 0) {
        active.push_back(add);
        continue;
      }
      ok = true;
      break;
    }
    if (ok) {
      c = c_ref;
      lambda.setZero();
      for (int r = 0; r < static_cast<int>(active.size()); ++r)
        lambda[active[r]] = std::max(0.0, lam_ref[r]);
    }
  }

  double viol = 0.0, comp = 0.0;
  for (int k = 0; k < k_count; ++k) {
    const double slack = 2.0 * hs.normals[k].dot(c).real() - hs.offsets[k];
    viol = std::max(viol, -slack);
    comp = std::max(comp, std::abs(lambda[k] * slack));
  }
  if (viol > 1e-6 * scale)
    throw InfeasibleError("min_norm: constraint set appears empty (residual " +
                          std::to_string(viol) + ")");

  MinNormResult out;
  out.point = std::move(c);
  out.objective = out.point.squaredNorm();
  out.kkt_residual = std::max(viol, comp) / scale;
  out.multipliers = std::move(lambda);
  out.sweeps = sweeps;
  return out;
}

namespace {

double attained_ratio(const std::vector<MaxMinTerm>& terms,
                      const std::vector<CVector>& points) {
  double t = std::numeric_limits<double>::infinity();
  for (const auto& term : terms) {
    const double v = (2.0 * term.a.dot(points[term.group]).real() - term.q) / term.weight;
    t = std::min(t, v);
  }
  return t;
}

}  // namespace

MaxMinResult max_min_ball(const std::vector<MaxMinTerm>& terms, int num_groups,
                          double power_budget) {
  if (!(power_budget > 0.0))
    throw std::invalid_argument("max_min_ball: power budget must be positive");
  if (num_groups < 1) throw std::invalid_argument("max_min_ball: need >= 1 group");
  std::vector<std::vector<int>> by_group(num_groups);
  for (int i = 0; i < static_cast<int>(terms.size()); ++i) {
    const auto& term = terms[i];
    if (term.group < 0 || term.group >= num_groups)
      throw std::invalid_argument("max_min_ball: term group index out of range");
    if (!(term.weight > 0.0))
      throw std::invalid_argument("max_min_ball: weights must be positive");
    if (term.a.squaredNorm() == 0.0)
      throw DegenerateError("max_min_ball: zero constraint direction");
    by_group[term.group].push_back(i);
  }
  for (int j = 0; j < num_groups; ++j)
    if (by_group[j].empty())
      throw std::invalid_argument("max_min_ball: group without constraints");

  std::vector<Eigen::VectorXd> warm(num_groups);
  MaxMinResult res;
  res.points.assign(num_groups, CVector());

  // Minimal total power to reach level t; infinity when some group's
  // half-space set is empty at that level.
  std::vector<CVector> probe_points(num_groups);
  auto probe = [&](double t) -> double {
    double power = 0.0;
    for (int j = 0; j < num_groups; ++j) {
      HalfSpaceSet hs;
      hs.normals.reserve(by_group[j].size());
      hs.offsets.reserve(by_group[j].size());
      for (int i : by_group[j]) {
        hs.normals.push_back(terms[i].a);
        hs.offsets.push_back(terms[i].q + t * terms[i].weight);
      }
      try {
        MinNormResult r = min_norm(hs, warm[j].size() ? &warm[j] : nullptr);
        warm[j] = r.multipliers;
        probe_points[j] = std::move(r.point);
        power += r.objective;
      } catch (const InfeasibleError&) {
        return std::numeric_limits<double>::infinity();
      }
    }
    ++res.probes;
    res.probe_trace.emplace_back(t, power);
    return power;
  };

  // c = 0 attains min(-q/weight), so this level is always reachable.
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& term : terms) lo = std::min(lo, -term.q / term.weight);
  double lo_power = probe(lo);
  std::vector<CVector> best = probe_points;

  double hi = std::max(1.0, 2.0 * std::abs(lo));
  bool bracketed = false;
  for (int step = 0; step < kMaxBisectionSteps; ++step) {
    const double p = probe(hi);
    if (p > power_budget) {
      bracketed = true;
      break;
    }
    lo = hi;
    lo_power = p;
    best = probe_points;
    hi *= 2.0;
  }
  if (!bracketed)
    throw DegenerateError("max_min_ball: objective appears unbounded");

  for (int step = 0; step < kMaxBisectionSteps; ++step) {
    if (hi - lo <= 1e-4 * std::max(std::abs(lo), std::abs(hi)) + 1e-8) break;
    const double mid = 0.5 * (lo + hi);
    const double p = probe(mid);
    if (p <= power_budget) {
      lo = mid;
      lo_power = p;
      best = probe_points;
    } else {
      hi = mid;
    }
  }

  res.points = best;
  res.t = attained_ratio(terms, res.points);
  // The budget binds at the optimum (generic case): scale up when that
  // does not lower the attained ratio.
  if (lo_power > 0.0 && lo_power < power_budget) {
    const double s = std::sqrt(power_budget / lo_power);
    std::vector<CVector> scaled(num_groups);
    for (int j = 0; j < num_groups; ++j) scaled[j] = s * best[j];
    const double t_scaled = attained_ratio(terms, scaled);
    if (t_scaled >= res.t) {
      res.points = std::move(scaled);
      res.t = t_scaled;
    }
  }
  return res;
}

}  // namespace mgmcast
