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

#include "mgmcast/model.hpp"

#include <algorithm>
#include <cmath>

#include "mgmcast/rng.hpp"

namespace mgmcast {

int SystemConfig::total_users() const {
  int k = 0;
  for (int kj : group_sizes) k += kj;
  return k;
}

int SystemConfig::min_group_size() const {
  return *std::min_element(group_sizes.begin(), group_sizes.end());
}

void SystemConfig::validate() const {
  if (group_sizes.empty()) throw std::invalid_argument("config: need at least one group");
  for (int kj : group_sizes)
    if (kj < 1) throw std::invalid_argument("config: group sizes must be positive");
  if (n_antennas <= total_users() - min_group_size())
    throw std::invalid_argument("config: need N > K - min_j K_j for null spaces");
  if (!(exclusion_radius_m >= 0.0) || !(exclusion_radius_m < cell_radius_m))
    throw std::invalid_argument("config: need 0 <= exclusion radius < cell radius");
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("config: bandwidth must be positive");
}

int ChannelSet::total_users() const {
  int k = 0;
  for (const auto& g : groups) k += static_cast<int>(g.cols());
  return k;
}

void ChannelSet::validate() const {
  if (groups.size() != noise_powers.size() || groups.size() != large_scale.size())
    throw std::invalid_argument("channels: per-group field counts disagree");
  for (std::size_t j = 0; j < groups.size(); ++j) {
    if (groups[j].rows() != groups[0].rows())
      throw std::invalid_argument("channels: inconsistent antenna count across groups");
    if (groups[j].cols() != noise_powers[j].size() || groups[j].cols() != large_scale[j].size())
      throw std::invalid_argument("channels: per-UE field lengths disagree");
    if ((noise_powers[j].array() <= 0.0).any())
      throw std::invalid_argument("channels: noise powers must be positive");
  }
}

double pathloss_db(double distance_km) {
  if (!(distance_km > 0.0)) throw std::domain_error("pathloss: distance must be positive");
  return -128.1 - 37.6 * std::log10(distance_km);
}

double noise_power_w(const SystemConfig& config) {
  if (config.noise_override_w >= 0.0) return config.noise_override_w;
  const double dbm = config.noise_psd_dbm_hz + 10.0 * std::log10(config.bandwidth_hz);
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

ChannelSet generate_channels(const SystemConfig& config, std::uint64_t trial_seed) {
  config.validate();
  const int n = config.n_antennas;
  const double sigma2 = noise_power_w(config);
  const double r_min = config.exclusion_radius_m;
  const double r_max = config.cell_radius_m;

  RandomStream positions(trial_seed, Substream::kUePositions);
  RandomStream fading(trial_seed, Substream::kSmallScaleFading);

  ChannelSet out;
  out.groups.reserve(config.group_sizes.size());
  for (int kj : config.group_sizes) {
    CMatrix g(n, kj);
    Eigen::VectorXd beta(kj), noise(kj);
    for (int k = 0; k < kj; ++k) {
      // Uniform over the annulus: area-preserving radius transform.
      const double u = positions.next_unit();
      const double d_m = std::sqrt(r_min * r_min + u * (r_max * r_max - r_min * r_min));
      positions.next_unit();  // azimuth; drawn for completeness, pathloss only needs d
      beta[k] = std::pow(10.0, pathloss_db(d_m / 1000.0) / 10.0);
      noise[k] = sigma2;
      const double amp = std::sqrt(beta[k]);
      for (int a = 0; a < n; ++a) g(a, k) = amp * fading.next_cgaussian();
    }
    out.groups.push_back(std::move(g));
    out.large_scale.push_back(std::move(beta));
    out.noise_powers.push_back(std::move(noise));
  }
  return out;
}

ChannelSet mmse_estimate(const ChannelSet& channels, double pilot_power_w,
                         int pilot_len, std::uint64_t trial_seed) {
  channels.validate();
  if (!(pilot_power_w > 0.0))
    throw std::invalid_argument("mmse: pilot power must be positive");
  if (pilot_len < channels.total_users())
    throw std::invalid_argument("mmse: pilot length must be >= total user count");

  RandomStream pilot_noise(trial_seed, Substream::kPilotNoise);
  const int n = channels.n_antennas();

  ChannelSet est = channels;
  for (int j = 0; j < channels.num_groups(); ++j) {
    for (int k = 0; k < channels.group_size(j); ++k) {
      const double beta = channels.large_scale[j][k];
      const double sigma2 = channels.noise_powers[j][k];
      const double s = std::sqrt(static_cast<double>(pilot_len) * pilot_power_w);
      const double coef = s * beta / (sigma2 + s * s * beta);
      const double noise_amp = std::sqrt(sigma2);
      for (int a = 0; a < n; ++a) {
        const cxd y = s * channels.groups[j](a, k) + noise_amp * pilot_noise.next_cgaussian();
        est.groups[j](a, k) = coef * y;
      }
    }
  }
  return est;
}

std::vector<Eigen::VectorXd> sinr(const ChannelSet& channels, const Precoder& precoder) {
  channels.validate();
  if (!precoder.has_composite())
    throw std::invalid_argument("sinr: composite precoding vectors required");
  const int g_count = channels.num_groups();
  if (precoder.num_groups() != g_count)
    throw std::invalid_argument("sinr: group count mismatch");
  for (const auto& w : precoder.composite)
    if (w.size() != channels.n_antennas())
      throw std::invalid_argument("sinr: precoder dimension mismatch");

  std::vector<Eigen::VectorXd> gamma(g_count);
  for (int j = 0; j < g_count; ++j) {
    const int kj = channels.group_size(j);
    gamma[j].resize(kj);
    for (int k = 0; k < kj; ++k) {
      const CVector g_jk = channels.groups[j].col(k);
      const double signal = std::norm(g_jk.dot(precoder.composite[j]));
      double interference = 0.0;
      for (int i = 0; i < g_count; ++i)
        if (i != j) interference += std::norm(g_jk.dot(precoder.composite[i]));
      gamma[j][k] = signal / (interference + channels.noise_powers[j][k]);
    }
  }
  return gamma;
}

double total_power(const Precoder& precoder) {
  double p = 0.0;
  if (precoder.has_composite()) {
    for (const auto& w : precoder.composite) p += w.squaredNorm();
  } else {
    for (const auto& c : precoder.inner) p += c.squaredNorm();
  }
  return p;
}

}  // namespace mgmcast
