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

#include "mgmcast/duality.hpp"

#include <cmath>
#include <limits>

namespace mgmcast {

namespace {

void check_shapes(const std::vector<CVector>& inner,
                  const std::vector<CMatrix>& effective,
                  const std::vector<Eigen::VectorXd>& eta) {
  if (inner.size() != effective.size() || inner.size() != eta.size())
    throw std::invalid_argument("duality: group count mismatch");
  for (std::size_t j = 0; j < inner.size(); ++j) {
    if (inner[j].size() != effective[j].rows() || eta[j].size() != effective[j].cols())
      throw std::invalid_argument("duality: dimension mismatch");
    if ((eta[j].array() <= 0.0).any())
      throw std::invalid_argument("duality: targets must be positive");
  }
}

double inner_power(const std::vector<CVector>& inner) {
  double p = 0.0;
  for (const auto& c : inner) p += c.squaredNorm();
  return p;
}

Precoder scaled_precoder(const Precoder& base, double factor) {
  Precoder out;
  out.inner.reserve(base.inner.size());
  for (const auto& c : base.inner) out.inner.push_back(factor * c);
  out.composite.reserve(base.composite.size());
  for (const auto& w : base.composite) out.composite.push_back(factor * w);
  return out;
}

}  // namespace

double min_weighted_snr(const std::vector<CVector>& inner,
                        const std::vector<CMatrix>& effective,
                        const std::vector<Eigen::VectorXd>& eta) {
  check_shapes(inner, effective, eta);
  double lambda = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < inner.size(); ++j)
    for (int k = 0; k < effective[j].cols(); ++k)
      lambda = std::min(lambda, std::norm(effective[j].col(k).dot(inner[j])) / eta[j][k]);
  return lambda;
}

std::vector<CVector> rescale_to_feasible(std::vector<CVector> inner,
                                         const std::vector<CMatrix>& effective,
                                         const std::vector<Eigen::VectorXd>& eta) {
  check_shapes(inner, effective, eta);
  for (std::size_t j = 0; j < inner.size(); ++j) {
    double factor_sq = 0.0;
    for (int k = 0; k < effective[j].cols(); ++k) {
      const double snr = std::norm(effective[j].col(k).dot(inner[j]));
      if (snr == 0.0)
        throw DegenerateError("rescale: channel orthogonal to precoding vector");
      factor_sq = std::max(factor_sq, eta[j][k] / snr);
    }
    inner[j] *= std::sqrt(factor_sq);
  }
  return inner;
}

MmfSolution qos_to_mmf(const QosSolution& sol, const std::vector<CMatrix>& effective,
                       const std::vector<Eigen::VectorXd>& eta, double budget) {
  if (!(budget > 0.0)) throw std::invalid_argument("qos_to_mmf: budget must be positive");
  check_shapes(sol.precoder.inner, effective, eta);
  const double p_app = inner_power(sol.precoder.inner);
  if (!(p_app > 0.0)) throw std::invalid_argument("qos_to_mmf: zero-power solution");
  const double lambda = min_weighted_snr(sol.precoder.inner, effective, eta);
  if (lambda < 1.0 - 1e-6)
    throw std::invalid_argument("qos_to_mmf: input is not QoS-feasible");

  MmfSolution out;
  out.budget = budget;
  out.objective = (budget / p_app) * lambda;
  out.precoder = scaled_precoder(sol.precoder, std::sqrt(budget / p_app));
  return out;
}

QosSolution mmf_to_qos(const MmfSolution& sol, const std::vector<CMatrix>& effective,
                       const std::vector<Eigen::VectorXd>& eta) {
  check_shapes(sol.precoder.inner, effective, eta);
  const double t = min_weighted_snr(sol.precoder.inner, effective, eta);
  if (!(t > 0.0)) throw std::invalid_argument("mmf_to_qos: nonpositive objective");

  QosSolution out;
  out.precoder = scaled_precoder(sol.precoder, 1.0 / std::sqrt(t));
  out.power = inner_power(sol.precoder.inner) / t;
  out.min_weighted_snr = min_weighted_snr(out.precoder.inner, effective, eta);
  return out;
}

ScalingLawReport check_scaling_law(const QosSolverFn& solver,
                                   const ChannelSet& channels,
                                   const std::vector<Eigen::VectorXd>& eta,
                                   double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("check_scaling_law: alpha must be positive");
  std::vector<Eigen::VectorXd> scaled_eta;
  scaled_eta.reserve(eta.size());
  for (const auto& e : eta) scaled_eta.push_back(alpha * e);

  const std::vector<CVector> base = solver(channels, eta);
  const std::vector<CVector> scaled = solver(channels, scaled_eta);
  if (base.size() != scaled.size())
    throw std::runtime_error("check_scaling_law: solver changed group count");

  const double p_base = inner_power(base);
  const double p_scaled = inner_power(scaled);

  ScalingLawReport rep;
  rep.power_deviation = std::abs(p_scaled / p_base - alpha) / alpha;
  double diff = 0.0, ref = 0.0;
  const double root = std::sqrt(alpha);
  for (std::size_t j = 0; j < base.size(); ++j) {
    diff += (scaled[j] - root * base[j]).squaredNorm();
    ref += alpha * base[j].squaredNorm();
  }
  rep.precoder_deviation = std::sqrt(diff / ref);
  return rep;
}

}  // namespace mgmcast
