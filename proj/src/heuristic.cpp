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

#include "mgmcast/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mgmcast/model.hpp"
#include "mgmcast/nullspace.hpp"
#include "mgmcast/sca.hpp"

namespace mgmcast {

namespace {

// Orthogonal (unnormalized) basis of the ordered channels, grown one vector
// at a time. Residuals are evaluated by modified Gram-Schmidt; dependent
// vectors are not pushed (they do not extend the span).
class GramBasis {
 public:
  CVector residual(const CVector& v, FlopCounter* fc) const {
    CVector r = v;
    for (const auto& u : u_) r -= (u.dot(r) / u.squaredNorm()) * u;
    if (fc) fc->add(static_cast<long long>(u_.size()) * 16 * v.size());
    return r;
  }
  void push(CVector u) { u_.push_back(std::move(u)); }

 private:
  std::vector<CVector> u_;
};

void check_channels(const CMatrix& eff) {
  for (int k = 0; k < eff.cols(); ++k)
    if (eff.col(k).squaredNorm() == 0.0)
      throw DegenerateError("heuristic: zero effective channel");
}

// |alpha| from the closed-form quadratic; requires coupling > 0 and an
// unmet constraint (c_term < 0).
double alpha_magnitude(double coupling_sq, double rho_abs, double c_term) {
  return (-rho_abs + std::sqrt(rho_abs * rho_abs - coupling_sq * c_term)) / coupling_sq;
}

// One serving pass. When `record_order` is null the order in `order` is
// followed; otherwise users are picked greedily by `policy` and the chosen
// order is appended. Returns the constructed precoding vector.
CVector construct(const CMatrix& eff, const Eigen::VectorXd& eta,
                  const std::vector<int>* order, OrderingPolicy policy,
                  std::vector<int>* record_order, FlopCounter* fc) {
  const int k_count = static_cast<int>(eff.cols());
  const int dim = static_cast<int>(eff.rows());
  if (k_count > dim)
    throw std::invalid_argument("heuristic: more users than spatial dimensions");
  check_channels(eff);
  for (int k = 0; k < k_count; ++k)
    if (!(eta[k] > 0.0)) throw std::invalid_argument("heuristic: targets must be positive");

  std::vector<int> remaining(k_count);
  std::iota(remaining.begin(), remaining.end(), 0);
  GramBasis basis;
  CVector c = CVector::Zero(dim);

  for (int step = 0; step < k_count; ++step) {
    int pick;
    if (!record_order) {
      pick = (*order)[step];
      remaining.erase(std::find(remaining.begin(), remaining.end(), pick));
    } else if (policy == OrderingPolicy::kBestFirstRef12) {
      // Weakest provided/requested ratio; ties by ascending index.
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_pos = 0;
      for (std::size_t p = 0; p < remaining.size(); ++p) {
        const int i = remaining[p];
        const double v = std::norm(eff.col(i).dot(c)) / eta[i];
        if (fc) fc->add(8LL * dim + 2);
        if (v < best) {
          best = v;
          best_pos = p;
        }
      }
      pick = remaining[best_pos];
      remaining.erase(remaining.begin() + best_pos);
    } else {
      // Largest incremental power, each candidate along its own residual
      // direction; already-satisfied users cost nothing and go last.
      double best = -1.0;
      std::size_t best_pos = 0;
      for (std::size_t p = 0; p < remaining.size(); ++p) {
        const int i = remaining[p];
        const CVector g = eff.col(i);
        const double provided = std::norm(g.dot(c));
        if (fc) fc->add(8LL * dim);
        double score = 0.0;
        if (provided < eta[i]) {
          const CVector r = basis.residual(g, fc);
          const double r2 = r.squaredNorm();
          if (r2 <= 1e-20 * g.squaredNorm()) {
            score = std::numeric_limits<double>::infinity();
          } else {
            const double coupling_sq = r2;  // |g^H (r/||r||)|^2 = ||r||^2
            const double rho_abs = std::sqrt(r2) * std::abs(g.dot(c));
            const double mag = alpha_magnitude(coupling_sq, rho_abs, provided - eta[i]);
            score = mag * mag;
          }
          if (fc) fc->add(8LL * dim + 16);
        }
        if (score > best) {
          best = score;
          best_pos = p;
        }
      }
      pick = remaining[best_pos];
      remaining.erase(remaining.begin() + best_pos);
    }
    if (record_order) record_order->push_back(pick);

    const CVector g = eff.col(pick);
    CVector r = basis.residual(g, fc);
    const double r_norm = r.norm();
    const bool satisfied = std::norm(g.dot(c)) >= eta[pick];
    if (fc) fc->add(8LL * dim + 4 * dim);
    if (r_norm < 1e-10 * g.norm()) {
      if (satisfied) continue;  // dependent but already served through others
      throw DegenerateError("heuristic: vanishing Gram-Schmidt residual");
    }
    if (!satisfied) {
      const CVector d = r / r_norm;
      c += alpha_step(g, d, c, eta[pick]) * d;
      if (fc) fc->add(24LL * dim);
    }
    basis.push(std::move(r));
  }
  return c;
}

}  // namespace

std::vector<int> order_users(const CMatrix& effective, const Eigen::VectorXd& eta,
                             OrderingPolicy policy, FlopCounter* fc) {
  const int k_count = static_cast<int>(effective.cols());
  if (eta.size() != k_count) throw std::invalid_argument("order_users: eta length mismatch");
  check_channels(effective);

  if (policy == OrderingPolicy::kWorstFirstRatio) {
    std::vector<double> ratio(k_count);
    for (int k = 0; k < k_count; ++k) {
      ratio[k] = eta[k] / effective.col(k).squaredNorm();
      if (fc) fc->add(4LL * effective.rows());
    }
    std::vector<int> idx(k_count);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return ratio[a] > ratio[b]; });
    if (fc && k_count > 1)
      fc->add(static_cast<long long>(k_count) *
              static_cast<long long>(std::ceil(std::log2(k_count))));
    return idx;
  }

  std::vector<int> order;
  order.reserve(k_count);
  construct(effective, eta, nullptr, policy, &order, fc);
  return order;
}

cxd alpha_step(const CVector& gbar, const CVector& dir, const CVector& c_prev,
               double eta) {
  const cxd gd = gbar.dot(dir);       // gbar^H d
  const cxd gc = gbar.dot(c_prev);    // gbar^H c
  const double coupling_sq = std::norm(gd);
  if (coupling_sq < 1e-12 * gbar.squaredNorm())
    throw DegenerateError("alpha_step: direction orthogonal to channel");
  const double c_term = std::norm(gc) - eta;
  if (c_term >= 0.0) return cxd(0.0, 0.0);
  const cxd rho = gd * std::conj(gc);  // gbar^H d * c^H gbar
  const double mag = alpha_magnitude(coupling_sq, std::abs(rho), c_term);
  const double phase = (std::abs(rho) == 0.0) ? 0.0 : -std::arg(rho);
  return std::polar(mag, phase);
}

CVector successive_precoder(const CMatrix& effective, const Eigen::VectorXd& eta,
                            const std::vector<int>& order, FlopCounter* fc) {
  const int k_count = static_cast<int>(effective.cols());
  if (static_cast<int>(order.size()) != k_count)
    throw std::invalid_argument("successive_precoder: order length mismatch");
  std::vector<bool> seen(k_count, false);
  for (int i : order) {
    if (i < 0 || i >= k_count || seen[i])
      throw std::invalid_argument("successive_precoder: order is not a permutation");
    seen[i] = true;
  }
  return construct(effective, eta, &order, OrderingPolicy::kWorstFirstRatio, nullptr, fc);
}

namespace {

struct InnerSolve {
  OuterLayer outer;
  std::vector<CVector> inner;
  double violation = 0.0;  // relative, over true SNR targets
};

InnerSolve solve_inner(const ChannelSet& channels, const std::vector<Eigen::VectorXd>& eta,
                       OrderingPolicy policy, FlopCounter* fc) {
  InnerSolve s;
  s.outer = compute_outer_layer(channels);
  const int g_count = s.outer.num_groups();
  if (static_cast<int>(eta.size()) != g_count)
    throw std::invalid_argument("heuristic: eta group count mismatch");
  s.inner.resize(g_count);
  for (int j = 0; j < g_count; ++j) {
    const CMatrix& eff = s.outer.effective[j];
    if (eta[j].size() != eff.cols())
      throw std::invalid_argument("heuristic: eta length mismatch");
    const std::vector<int> order = order_users(eff, eta[j], policy, fc);
    s.inner[j] = successive_precoder(eff, eta[j], order, fc);
    for (int k = 0; k < eff.cols(); ++k) {
      const double snr = std::norm(eff.col(k).dot(s.inner[j]));
      s.violation = std::max(s.violation, (eta[j][k] - snr) / eta[j][k]);
    }
  }
  s.violation = std::max(0.0, s.violation);
  return s;
}

std::vector<int> sizes_of(const ChannelSet& channels) {
  std::vector<int> sizes(channels.num_groups());
  for (int j = 0; j < channels.num_groups(); ++j) sizes[j] = channels.group_size(j);
  return sizes;
}

}  // namespace

HeuristicQosResult heuristic_qos(const ChannelSet& channels,
                                 const std::vector<Eigen::VectorXd>& eta,
                                 OrderingPolicy policy, FlopCounter* fc) {
  InnerSolve s = solve_inner(channels, eta, policy, fc);
  HeuristicQosResult res;
  res.report.iterations = channels.total_users();
  res.report.converged = true;
  res.report.max_constraint_violation = s.violation;
  const std::vector<int> sizes = sizes_of(channels);
  res.report.flops_estimate =
      flop_estimate_bdzf(channels.n_antennas(), sizes) +
      flop_estimate_alg3(channels.n_antennas(), sizes) +
      sca_composition_flops(channels.n_antennas(), channels.num_groups(),
                            channels.total_users());
  res.precoder = compose(s.outer, std::move(s.inner));
  res.report.objective = total_power(res.precoder);
  res.report.objective_trace.assign(1, res.report.objective);
  return res;
}

HeuristicMmfResult heuristic_mmf(const ChannelSet& channels,
                                 const std::vector<Eigen::VectorXd>& eta,
                                 double power_budget, OrderingPolicy policy) {
  if (!(power_budget > 0.0))
    throw std::invalid_argument("heuristic: power budget must be positive");
  InnerSolve s = solve_inner(channels, eta, policy, nullptr);
  double qos_power = 0.0;
  for (const auto& c : s.inner) qos_power += c.squaredNorm();
  double lambda = std::numeric_limits<double>::infinity();
  for (int j = 0; j < s.outer.num_groups(); ++j)
    for (int k = 0; k < s.outer.effective[j].cols(); ++k)
      lambda = std::min(lambda,
                        std::norm(s.outer.effective[j].col(k).dot(s.inner[j])) / eta[j][k]);

  const double scale = std::sqrt(power_budget / qos_power);
  for (auto& c : s.inner) c *= scale;

  HeuristicMmfResult res;
  res.t = (power_budget / qos_power) * lambda;
  res.report.objective = res.t;
  res.report.objective_trace.assign(1, res.t);
  res.report.iterations = 1;
  res.report.converged = true;
  res.report.max_constraint_violation = 0.0;
  const std::vector<int> sizes = sizes_of(channels);
  res.report.flops_estimate =
      flop_estimate_bdzf(channels.n_antennas(), sizes) +
      flop_estimate_alg3(channels.n_antennas(), sizes) +
      sca_composition_flops(channels.n_antennas(), channels.num_groups(),
                            channels.total_users());
  res.precoder = compose(s.outer, std::move(s.inner));
  return res;
}

long long flop_estimate_alg3(int n_antennas, const std::vector<int>& group_sizes) {
  int k_total = 0;
  for (int kj : group_sizes) k_total += kj;
  long long total = 0;
  for (int kj : group_sizes) {
    const long long n = n_antennas - (k_total - kj);
    const long long k = kj;
    const long long ordering =
        4 * k * n + (k > 1 ? k * static_cast<long long>(std::ceil(std::log2(k))) : 0);
    const long long gram_schmidt = llroundl(8.0L * n * k * k - (8.0L / 3.0L) * k * k * k);
    const long long first_user = 2 * (n + 1);
    const long long steps = 24 * (k - 1) * n;
    total += ordering + gram_schmidt + first_user + steps;
  }
  return total;
}

}  // namespace mgmcast
