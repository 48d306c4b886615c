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

#include "mgmcast/sca.hpp"

#include <cmath>
#include <limits>

#include "mgmcast/nullspace.hpp"
#include "mgmcast/rng.hpp"

namespace mgmcast {

HalfSpace linearize(const CVector& z, const CVector& gbar, double eta) {
  const cxd inner = gbar.dot(z);  // gbar^H z
  HalfSpace h;
  h.a = gbar * inner;
  h.b = eta + std::norm(inner);
  return h;
}

namespace {

constexpr int kMaxInitRetries = 10;

CVector random_inner(RandomStream& rs, int dim) {
  CVector z(dim);
  for (int i = 0; i < dim; ++i) z[i] = rs.next_cgaussian();
  return z;
}

CVector group_channel_sum(const CMatrix& eff) {
  CVector z = CVector::Zero(eff.rows());
  for (int k = 0; k < eff.cols(); ++k) {
    const double nrm = eff.col(k).norm();
    if (nrm == 0.0) throw DegenerateError("sca init: zero effective channel");
    z += eff.col(k) / nrm;
  }
  return z;
}

bool init_nondegenerate(const CMatrix& eff, const CVector& z) {
  if (z.squaredNorm() == 0.0) return false;
  for (int k = 0; k < eff.cols(); ++k) {
    const double ip = std::abs(eff.col(k).dot(z));
    if (ip * ip <= 1e-24 * eff.col(k).squaredNorm() * z.squaredNorm()) return false;
  }
  return true;
}

// Initial expansion point for one group; re-randomizes when some target
// channel is orthogonal to the candidate.
CVector initial_point(const CMatrix& eff, const ScaOptions& options, int group) {
  CVector z;
  switch (options.init_policy) {
    case InitPolicy::kGroupChannelSum:
      z = group_channel_sum(eff);
      break;
    case InitPolicy::kRandom:
      z = CVector::Zero(eff.rows());
      break;
    case InitPolicy::kWarmStart:
      if (static_cast<int>(options.warm_start_inner.size()) <= group)
        throw std::invalid_argument("sca: warm start vectors missing");
      z = options.warm_start_inner[group];
      if (z.size() != eff.rows())
        throw std::invalid_argument("sca: warm start dimension mismatch");
      break;
  }
  RandomStream rs(split_seed(options.random_seed, static_cast<std::uint64_t>(group)),
                  Substream::kScaInit);
  for (int attempt = 0; attempt <= kMaxInitRetries; ++attempt) {
    const bool need_draw = attempt > 0 || z.squaredNorm() == 0.0 ||
                           options.init_policy == InitPolicy::kRandom;
    if (need_draw && (attempt > 0 || options.init_policy != InitPolicy::kWarmStart))
      z = random_inner(rs, static_cast<int>(eff.rows()));
    if (init_nondegenerate(eff, z)) return z;
  }
  throw DegenerateError("sca init: no nondegenerate starting point found");
}

// Rescale so the most violated target holds with equality:
// min_k |gbar_k^H z|^2 / eta_k = 1.
void rescale_tight(const CMatrix& eff, const Eigen::VectorXd& eta, CVector& z) {
  double factor_sq = 0.0;
  for (int k = 0; k < eff.cols(); ++k)
    factor_sq = std::max(factor_sq, eta[k] / std::norm(eff.col(k).dot(z)));
  z *= std::sqrt(factor_sq);
}

struct GroupQos {
  CVector point;
  SolveReport report;
};

GroupQos qos_sca_group(const CMatrix& eff, const Eigen::VectorXd& eta,
                       const ScaOptions& options, int group) {
  const int kj = static_cast<int>(eff.cols());
  for (int k = 0; k < kj; ++k)
    if (!(eta[k] > 0.0)) throw std::invalid_argument("sca: targets must be positive");

  CVector z = initial_point(eff, options, group);
  rescale_tight(eff, eta, z);

  GroupQos out;
  out.report.converged = false;
  CVector best = z;
  double best_obj = z.squaredNorm();
  double prev_obj = std::numeric_limits<double>::infinity();
  Eigen::VectorXd warm;

  for (int iter = 0; iter < options.max_iters; ++iter) {
    HalfSpaceSet hs;
    hs.normals.reserve(kj);
    hs.offsets.reserve(kj);
    for (int k = 0; k < kj; ++k) {
      HalfSpace h = linearize(z, eff.col(k), eta[k]);
      hs.normals.push_back(std::move(h.a));
      hs.offsets.push_back(h.b);
    }
    MinNormResult r = min_norm(hs, warm.size() ? &warm : nullptr);
    warm = r.multipliers;
    const double obj = r.objective;

    // Solver-noise stall: keep the best iterate, drop the offending value.
    // A stall after the sequence stabilized is ordinary convergence.
    if (!out.report.objective_trace.empty() &&
        obj > prev_obj + 1e-9 * std::max(1.0, prev_obj)) {
      out.report.converged = std::abs(obj - prev_obj) / prev_obj < options.rel_tol;
      break;
    }

    out.report.objective_trace.push_back(obj);
    double viol = 0.0;
    for (int k = 0; k < kj; ++k)
      viol = std::max(viol, (eta[k] - std::norm(eff.col(k).dot(r.point))) / eta[k]);
    out.report.max_constraint_violation =
        std::max(out.report.max_constraint_violation, std::max(0.0, viol));

    if (obj < best_obj) {
      best = r.point;
      best_obj = obj;
    }
    z = std::move(r.point);
    if (std::isfinite(prev_obj) && std::abs(obj - prev_obj) / prev_obj < options.rel_tol) {
      out.report.converged = true;
      break;
    }
    prev_obj = obj;
  }

  out.point = std::move(best);
  out.report.objective = best_obj;
  out.report.iterations = static_cast<int>(out.report.objective_trace.size());
  const long long dim = eff.rows();
  out.report.flops_estimate =
      static_cast<long long>(kScaSolveFlopsPerDim3) * dim * dim * dim *
      out.report.iterations;
  return out;
}

}  // namespace

ScaQosResult qos_bdzf_sca(const ChannelSet& channels,
                          const std::vector<Eigen::VectorXd>& eta,
                          const ScaOptions& options) {
  const OuterLayer outer = compute_outer_layer(channels);
  const int g_count = outer.num_groups();
  if (static_cast<int>(eta.size()) != g_count)
    throw std::invalid_argument("sca: eta group count mismatch");

  ScaQosResult res;
  std::vector<CVector> inner(g_count);
  res.reports.resize(g_count);
  for (int j = 0; j < g_count; ++j) {
    if (eta[j].size() != outer.effective[j].cols())
      throw std::invalid_argument("sca: eta length mismatch");
    GroupQos g = qos_sca_group(outer.effective[j], eta[j], options, j);
    inner[j] = std::move(g.point);
    res.reports[j] = std::move(g.report);
  }

  std::size_t max_len = 1;
  bool all_converged = true;
  for (const auto& rep : res.reports) {
    max_len = std::max(max_len, rep.objective_trace.size());
    all_converged = all_converged && rep.converged;
    res.combined.max_constraint_violation =
        std::max(res.combined.max_constraint_violation, rep.max_constraint_violation);
  }
  std::vector<double>& total = res.combined.objective_trace;
  total.assign(max_len, 0.0);
  for (const auto& rep : res.reports)
    for (std::size_t k = 0; k < max_len; ++k)
      total[k] += rep.objective_trace[std::min(k, rep.objective_trace.size() - 1)];
  res.combined.iterations = static_cast<int>(max_len);
  bool crossed = max_len == 1;
  for (std::size_t k = 1; k < max_len; ++k)
    if (std::abs(total[k] - total[k - 1]) / total[k - 1] < options.rel_tol) {
      res.combined.iterations = static_cast<int>(k) + 1;
      crossed = true;
      break;
    }
  total.resize(res.combined.iterations);
  res.combined.converged = crossed && all_converged;
  res.combined.objective = 0.0;
  for (const auto& rep : res.reports) res.combined.objective += rep.objective;
  res.combined.flops_estimate = flop_estimate_sca(
      channels.n_antennas(), [&] {
        std::vector<int> sizes(g_count);
        for (int j = 0; j < g_count; ++j) sizes[j] = channels.group_size(j);
        return sizes;
      }(), res.combined.iterations);

  res.precoder = compose(outer, std::move(inner));
  return res;
}

ScaMmfResult mmf_bdzf_sca(const ChannelSet& channels,
                          const std::vector<Eigen::VectorXd>& eta,
                          double power_budget, const ScaOptions& options) {
  if (!(power_budget > 0.0))
    throw std::invalid_argument("sca: power budget must be positive");
  const OuterLayer outer = compute_outer_layer(channels);
  const int g_count = outer.num_groups();
  if (static_cast<int>(eta.size()) != g_count)
    throw std::invalid_argument("sca: eta group count mismatch");
  for (int j = 0; j < g_count; ++j)
    if (eta[j].size() != outer.effective[j].cols() || (eta[j].array() <= 0.0).any())
      throw std::invalid_argument("sca: invalid eta");

  std::vector<CVector> z(g_count);
  double init_power = 0.0;
  for (int j = 0; j < g_count; ++j) {
    z[j] = initial_point(outer.effective[j], options, j);
    init_power += z[j].squaredNorm();
  }
  const double norm_factor = std::sqrt(power_budget / init_power);
  for (auto& zj : z) zj *= norm_factor;

  ScaMmfResult res;
  res.report.converged = false;
  double prev_t = std::numeric_limits<double>::quiet_NaN();

  for (int iter = 0; iter < options.max_iters; ++iter) {
    std::vector<MaxMinTerm> terms;
    terms.reserve(channels.total_users());
    double t_at_z = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g_count; ++j) {
      const CMatrix& eff = outer.effective[j];
      for (int k = 0; k < eff.cols(); ++k) {
        const cxd ip = eff.col(k).dot(z[j]);
        MaxMinTerm term;
        term.group = j;
        term.a = eff.col(k) * ip;
        term.q = std::norm(ip);
        term.weight = eta[j][k];
        t_at_z = std::min(t_at_z, term.q / term.weight);
        terms.push_back(std::move(term));
      }
    }
    MaxMinResult sub = max_min_ball(terms, g_count, power_budget);
    // The expansion point itself is feasible for the subproblem; never
    // accept an answer below it.
    if (sub.t < t_at_z - 1e-12 * std::abs(t_at_z)) break;

    res.report.objective_trace.push_back(sub.t);
    z = std::move(sub.points);
    if (res.report.objective_trace.size() >= 2 &&
        std::abs(sub.t - prev_t) / std::abs(prev_t) < options.rel_tol) {
      res.report.converged = true;
      break;
    }
    prev_t = sub.t;
  }

  double t_true = std::numeric_limits<double>::infinity();
  double power = 0.0;
  for (int j = 0; j < g_count; ++j) {
    const CMatrix& eff = outer.effective[j];
    for (int k = 0; k < eff.cols(); ++k)
      t_true = std::min(t_true, std::norm(eff.col(k).dot(z[j])) / eta[j][k]);
    power += z[j].squaredNorm();
  }
  res.t = t_true;
  res.report.objective = t_true;
  res.report.iterations = static_cast<int>(res.report.objective_trace.size());
  res.report.max_constraint_violation = std::max(0.0, (power - power_budget) / power_budget);
  res.report.flops_estimate = flop_estimate_sca(
      channels.n_antennas(), [&] {
        std::vector<int> sizes(g_count);
        for (int j = 0; j < g_count; ++j) sizes[j] = channels.group_size(j);
        return sizes;
      }(), res.report.iterations);
  res.precoder = compose(outer, std::move(z));
  return res;
}

long long sca_composition_flops(int n_antennas, int num_groups, int total_users) {
  const long long n = n_antennas;
  return 8LL * num_groups * n * n - 8LL * (num_groups - 1) * total_users * n;
}

long long flop_estimate_sca(int n_antennas, const std::vector<int>& group_sizes,
                            int iterations) {
  int k_total = 0;
  for (int kj : group_sizes) k_total += kj;
  long long per_iter = 0;
  for (int kj : group_sizes) {
    const long long dim = n_antennas - (k_total - kj);
    per_iter += dim * dim * dim;
  }
  return flop_estimate_bdzf(n_antennas, group_sizes) +
         static_cast<long long>(iterations) * kScaSolveFlopsPerDim3 * per_iter +
         sca_composition_flops(n_antennas, static_cast<int>(group_sizes.size()), k_total);
}

}  // namespace mgmcast
