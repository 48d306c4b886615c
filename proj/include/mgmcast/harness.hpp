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

#ifndef MGMCAST_HARNESS_HPP
#define MGMCAST_HARNESS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mgmcast/heuristic.hpp"
#include "mgmcast/types.hpp"

namespace mgmcast {

enum class Mode { kQos, kMmf };
enum class CsiModel { kPerfect, kMmse };
enum class Algo { kSca, kHeuristic, kHeuristicWarmSca };

struct AlgoSpec {
  Algo algo = Algo::kSca;
  OrderingPolicy policy = OrderingPolicy::kWorstFirstRatio;
  std::string tag() const;
};

/// One batch experiment: a system configuration, a problem mode, the CSI
/// model, the algorithms to run on identical channels, and a trial count.
struct Scenario {
  SystemConfig config;
  Mode mode = Mode::kQos;
  double eta = 255.0;  // uniform per-UE target (QoS) / weight (MMF)
  std::vector<Eigen::VectorXd> eta_per_group;  // optional non-uniform override
  double power_budget = 10.0;                  // MMF only
  CsiModel csi = CsiModel::kPerfect;
  double pilot_power_w = 1.0;
  int pilot_len = 0;  // 0 -> total user count
  std::vector<AlgoSpec> algorithms = {{Algo::kSca}, {Algo::kHeuristic}};
  int trials = 100;
  int threads = 0;  // 0 -> hardware concurrency

  void validate() const;
  std::vector<Eigen::VectorXd> expanded_eta() const;
};

/// One (trial, algorithm) outcome. The objective is total transmit power in
/// watts (QoS mode) or the minimum weighted SINR evaluated on the true
/// channels (MMF mode). wall_time_s is informational and never serialized.
struct TrialRecord {
  int trial = 0;
  std::string algorithm;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  long long flops_estimate = 0;
  std::uint64_t channel_hash = 0;
  std::string error;  // nonempty when the algorithm failed on this trial
  double wall_time_s = 0.0;
};

struct AlgoSummary {
  std::string algorithm;
  int successes = 0;
  int failures = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::array<double, 5> percentiles{};  // 5, 25, 50, 75, 95
  double mean_wall_time_s = 0.0;
};

struct ScenarioResult {
  std::vector<TrialRecord> records;  // sorted by (trial, algorithm tag)
  std::vector<AlgoSummary> summaries;
};

/// Runs every requested algorithm on the same per-trial ChannelSet (and the
/// same MMSE estimates when enabled). Trials execute on a worker pool; each
/// trial derives its own seed so results are independent of scheduling.
ScenarioResult run_scenario(const Scenario& scenario, std::uint64_t master_seed);

/// Paired ordering-policy comparison of the successive heuristic on the QoS
/// problem (identical channels per trial across policies).
ScenarioResult compare_ordering(const SystemConfig& config, double eta,
                                const std::vector<OrderingPolicy>& policies,
                                int trials, std::uint64_t master_seed);

/// Header + one row per record, RFC-4180 quoting, floats at 12 significant
/// digits, '.' decimal point regardless of locale.
void emit_csv(const std::vector<TrialRecord>& records, const std::string& path);
std::string to_csv(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> parse_csv_string(const std::string& body);

/// Closed-form flop counts per antenna count.
struct FlopRow {
  int n_antennas = 0;
  long long bdzf = 0;
  long long sca_per_iteration = 0;  // solver constant x sum_j (N - tau_j)^3
  long long sca_composition = 0;
  long long sca_total = 0;  // at the given iteration count
  long long alg3 = 0;       // successive inner layer
};
std::vector<FlopRow> report_flops(const std::vector<int>& n_values,
                                  const std::vector<int>& group_sizes,
                                  int sca_iterations);

/// FNV-1a over the raw bytes of the channel matrices and per-UE fields.
std::uint64_t hash_channels(const ChannelSet& channels);

}  // namespace mgmcast

#endif  // MGMCAST_HARNESS_HPP
