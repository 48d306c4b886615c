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

#ifndef MGMCAST_MODEL_HPP
#define MGMCAST_MODEL_HPP

#include <cstdint>
#include <vector>

#include "mgmcast/types.hpp"

namespace mgmcast {

/// 3GPP-style large-scale attenuation, -128.1 - 37.6 log10(d) dB with d in
/// kilometers. Throws std::domain_error for non-positive distances.
double pathloss_db(double distance_km);

/// Thermal noise power in watts from the configured PSD (dBm/Hz) and
/// bandwidth, or the per-config override when set.
double noise_power_w(const SystemConfig& config);

/// Draws one channel realization: UE positions uniform on the annulus
/// [exclusion_radius, cell_radius], g_jk = sqrt(beta_jk) h_jk with
/// h_jk ~ CN(0, I_N). Bitwise deterministic in (config, trial_seed).
ChannelSet generate_channels(const SystemConfig& config, std::uint64_t trial_seed);

/// MMSE channel estimates from uplink pilots:
///   ghat = s*beta/(sigma^2 + s^2*beta) * (s*g + n),  s = sqrt(tau_p * p),
/// with n ~ CN(0, sigma^2 I). With unit pilot power this is the classical
/// sqrt(tau_p)*beta/(sigma^2 + tau_p*beta) (sqrt(tau_p) g + n) estimator.
/// Requires pilot_len >= K (orthogonal pilots).
ChannelSet mmse_estimate(const ChannelSet& channels, double pilot_power_w,
                         int pilot_len, std::uint64_t trial_seed);

/// Per-UE SINR of a composite precoder,
///   gamma_jk = |g_jk^H w_j|^2 / (sum_{i != j} |g_jk^H w_i|^2 + sigma_jk^2).
std::vector<Eigen::VectorXd> sinr(const ChannelSet& channels,
                                  const Precoder& precoder);

/// Total transmit power sum_j ||w_j||^2 (composite) or sum_j ||c_j||^2
/// (inner); the two agree whenever both layers are present.
double total_power(const Precoder& precoder);

}  // namespace mgmcast

#endif  // MGMCAST_MODEL_HPP
