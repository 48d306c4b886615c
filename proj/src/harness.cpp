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

#include "mgmcast/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "mgmcast/duality.hpp"
#include "mgmcast/model.hpp"
#include "mgmcast/nullspace.hpp"
#include "mgmcast/rng.hpp"
#include "mgmcast/sca.hpp"

namespace mgmcast {

namespace {

std::string policy_tag(OrderingPolicy policy) {
  switch (policy) {
    case OrderingPolicy::kBestFirstRef12: return "best_first_ref12";
    case OrderingPolicy::kWorstFirstPower: return "worst_first_power";
    case OrderingPolicy::kWorstFirstRatio: return "worst_first_ratio";
  }
  return "?";
}

}  // namespace

std::string AlgoSpec::tag() const {
  switch (algo) {
    case Algo::kSca: return "sca";
    case Algo::kHeuristic: return "heuristic[" + policy_tag(policy) + "]";
    case Algo::kHeuristicWarmSca: return "heuristic+sca[" + policy_tag(policy) + "]";
  }
  return "?";
}

void Scenario::validate() const {
  config.validate();
  if (trials < 1) throw std::invalid_argument("scenario: need at least one trial");
  if (algorithms.empty()) throw std::invalid_argument("scenario: no algorithms requested");
  if (eta_per_group.empty()) {
    if (!(eta > 0.0)) throw std::invalid_argument("scenario: eta must be positive");
  } else {
    if (static_cast<int>(eta_per_group.size()) != config.num_groups())
      throw std::invalid_argument("scenario: eta group count mismatch");
    for (int j = 0; j < config.num_groups(); ++j)
      if (eta_per_group[j].size() != config.group_sizes[j] ||
          (eta_per_group[j].array() <= 0.0).any())
        throw std::invalid_argument("scenario: invalid per-group eta");
  }
  if (mode == Mode::kMmf && !(power_budget > 0.0))
    throw std::invalid_argument("scenario: MMF needs a positive power budget");
  if (csi == CsiModel::kMmse) {
    if (!(pilot_power_w > 0.0))
      throw std::invalid_argument("scenario: pilot power must be positive");
    if (pilot_len != 0 && pilot_len < config.total_users())
      throw std::invalid_argument("scenario: pilot length must be >= K");
  }
}

std::vector<Eigen::VectorXd> Scenario::expanded_eta() const {
  if (!eta_per_group.empty()) return eta_per_group;
  std::vector<Eigen::VectorXd> out;
  out.reserve(config.group_sizes.size());
  for (int kj : config.group_sizes)
    out.push_back(Eigen::VectorXd::Constant(kj, eta));
  return out;
}

std::uint64_t hash_channels(const ChannelSet& channels) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_bytes = [&h](const void* data, std::size_t bytes) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (int j = 0; j < channels.num_groups(); ++j) {
    mix_bytes(channels.groups[j].data(), sizeof(cxd) * channels.groups[j].size());
    mix_bytes(channels.noise_powers[j].data(), sizeof(double) * channels.noise_powers[j].size());
    mix_bytes(channels.large_scale[j].data(), sizeof(double) * channels.large_scale[j].size());
  }
  return h;
}

namespace {

// Minimum weighted SINR evaluated through the full interference expression
// on the given (true) channels.
double evaluate_min_weighted_sinr(const ChannelSet& truth, const Precoder& precoder,
                                  const std::vector<Eigen::VectorXd>& eta) {
  const std::vector<Eigen::VectorXd> gamma = sinr(truth, precoder);
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < gamma.size(); ++j)
    for (int k = 0; k < gamma[j].size(); ++k)
      t = std::min(t, gamma[j][k] / eta[j][k]);
  return t;
}

TrialRecord run_algorithm(const Scenario& scenario, const AlgoSpec& spec, int trial,
                          const ChannelSet& truth, const ChannelSet& design,
                          std::uint64_t design_hash) {
  TrialRecord rec;
  rec.trial = trial;
  rec.algorithm = spec.tag();
  rec.channel_hash = design_hash;
  const std::vector<Eigen::VectorXd> eta = scenario.expanded_eta();
  const auto& sizes = scenario.config.group_sizes;
  const int n = scenario.config.n_antennas;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (scenario.mode == Mode::kQos) {
      if (spec.algo == Algo::kHeuristic) {
        HeuristicQosResult h = heuristic_qos(design, eta, spec.policy);
        rec.objective = total_power(h.precoder);
        rec.iterations = h.report.iterations;
        rec.converged = h.report.converged;
        rec.flops_estimate = h.report.flops_estimate;
      } else {
        ScaOptions opts;
        long long warm_flops = 0;
        if (spec.algo == Algo::kHeuristicWarmSca) {
          HeuristicQosResult h = heuristic_qos(design, eta, spec.policy);
          opts.init_policy = InitPolicy::kWarmStart;
          opts.warm_start_inner = h.precoder.inner;
          warm_flops = h.report.flops_estimate;
        }
        ScaQosResult r = qos_bdzf_sca(design, eta, opts);
        rec.objective = total_power(r.precoder);
        rec.iterations = r.combined.iterations;
        rec.converged = r.combined.converged;
        rec.flops_estimate = warm_flops + flop_estimate_sca(n, sizes, rec.iterations);
      }
    } else {
      Precoder precoder;
      if (spec.algo == Algo::kHeuristic) {
        HeuristicMmfResult h = heuristic_mmf(design, eta, scenario.power_budget, spec.policy);
        precoder = std::move(h.precoder);
        rec.iterations = h.report.iterations;
        rec.converged = h.report.converged;
        rec.flops_estimate = h.report.flops_estimate;
      } else {
        ScaOptions opts;
        long long warm_flops = 0;
        if (spec.algo == Algo::kHeuristicWarmSca) {
          HeuristicMmfResult h = heuristic_mmf(design, eta, scenario.power_budget, spec.policy);
          opts.init_policy = InitPolicy::kWarmStart;
          opts.warm_start_inner = h.precoder.inner;
          warm_flops = h.report.flops_estimate;
        }
        ScaMmfResult r = mmf_bdzf_sca(design, eta, scenario.power_budget, opts);
        precoder = std::move(r.precoder);
        rec.iterations = r.report.iterations;
        rec.converged = r.report.converged;
        rec.flops_estimate = warm_flops + r.report.flops_estimate;
      }
      rec.objective = evaluate_min_weighted_sinr(truth, precoder, eta);
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

AlgoSummary summarize(const std::string& tag, std::vector<const TrialRecord*> recs) {
  AlgoSummary s;
  s.algorithm = tag;
  std::vector<double> values;
  double wall = 0.0;
  for (const TrialRecord* r : recs) {
    wall += r->wall_time_s;
    if (r->error.empty()) {
      values.push_back(r->objective);
      ++s.successes;
    } else {
      ++s.failures;
    }
  }
  if (!recs.empty()) s.mean_wall_time_s = wall / static_cast<double>(recs.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;
  std::sort(values.begin(), values.end());
  const std::array<double, 5> ps = {5.0, 25.0, 50.0, 75.0, 95.0};
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double pos = ps[i] / 100.0 * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    s.percentiles[i] = values[lo] * (1.0 - frac) + values[hi] * frac;
  }
  return s;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& scenario, std::uint64_t master_seed) {
  scenario.validate();
  const int trials = scenario.trials;
  const int algo_count = static_cast<int>(scenario.algorithms.size());

  std::vector<TrialRecord> records(static_cast<std::size_t>(trials) * algo_count);
  auto run_trial = [&](int trial) {
    const std::uint64_t trial_seed =
        split_seed(master_seed, static_cast<std::uint64_t>(trial));
    const ChannelSet truth = generate_channels(scenario.config, trial_seed);
    ChannelSet design;
    if (scenario.csi == CsiModel::kMmse) {
      const int pl = scenario.pilot_len > 0 ? scenario.pilot_len : truth.total_users();
      design = mmse_estimate(truth, scenario.pilot_power_w, pl, trial_seed);
    } else {
      design = truth;
    }
    const std::uint64_t h = hash_channels(design);
    for (int a = 0; a < algo_count; ++a)
      records[static_cast<std::size_t>(trial) * algo_count + a] =
          run_algorithm(scenario, scenario.algorithms[a], trial, truth, design, h);
  };

  int workers = scenario.threads > 0 ? scenario.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, trials));
  if (workers == 1) {
    for (int t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) run_trial(t);
      });
    for (auto& th : pool) th.join();
  }

  std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return a.trial != b.trial ? a.trial < b.trial : a.algorithm < b.algorithm;
  });

  ScenarioResult out;
  out.records = std::move(records);
  for (const auto& spec : scenario.algorithms) {
    std::vector<const TrialRecord*> recs;
    for (const auto& r : out.records)
      if (r.algorithm == spec.tag()) recs.push_back(&r);
    out.summaries.push_back(summarize(spec.tag(), std::move(recs)));
  }
  return out;
}

ScenarioResult compare_ordering(const SystemConfig& config, double eta,
                                const std::vector<OrderingPolicy>& policies,
                                int trials, std::uint64_t master_seed) {
  Scenario scenario;
  scenario.config = config;
  scenario.mode = Mode::kQos;
  scenario.eta = eta;
  scenario.trials = trials;
  scenario.algorithms.clear();
  for (OrderingPolicy p : policies)
    scenario.algorithms.push_back({Algo::kHeuristic, p});
  return run_scenario(scenario, master_seed);
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string to_csv(const std::vector<TrialRecord>& records) {
  std::string out =
      "trial,algorithm,objective,iterations,converged,flops_estimate,channel_hash,error\n";
  for (const auto& r : records) {
    out += std::to_string(r.trial);
    out += ',';
    out += csv_escape(r.algorithm);
    out += ',';
    out += format_double(r.objective);
    out += ',';
    out += std::to_string(r.iterations);
    out += ',';
    out += r.converged ? "1" : "0";
    out += ',';
    out += std::to_string(r.flops_estimate);
    out += ',';
    out += std::to_string(r.channel_hash);
    out += ',';
    out += csv_escape(r.error);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
  const std::string body = to_csv(records);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw std::runtime_error("emit_csv: write to '" + path + "' failed");
}

std::vector<TrialRecord> parse_csv_string(const std::string& body) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < body.size() && body[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      fields.push_back(std::move(cur));
      cur.clear();
      rows.push_back(std::move(fields));
      fields.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (!cur.empty() || !fields.empty()) {
    fields.push_back(std::move(cur));
    rows.push_back(std::move(fields));
  }

  std::vector<TrialRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {  // skip header
    const auto& f = rows[i];
    if (f.size() != 8) throw std::runtime_error("parse_csv: malformed row");
    TrialRecord r;
    r.trial = std::stoi(f[0]);
    r.algorithm = f[1];
    r.objective = std::stod(f[2]);
    r.iterations = std::stoi(f[3]);
    r.converged = f[4] == "1";
    r.flops_estimate = std::stoll(f[5]);
    r.channel_hash = std::stoull(f[6]);
    r.error = f[7];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<FlopRow> report_flops(const std::vector<int>& n_values,
                                  const std::vector<int>& group_sizes,
                                  int sca_iterations) {
  int k_total = 0;
  for (int kj : group_sizes) k_total += kj;
  std::vector<FlopRow> rows;
  rows.reserve(n_values.size());
  for (int n : n_values) {
    FlopRow row;
    row.n_antennas = n;
    row.bdzf = flop_estimate_bdzf(n, group_sizes);
    long long per_iter = 0;
    for (int kj : group_sizes) {
      const long long dim = n - (k_total - kj);
      per_iter += dim * dim * dim;
    }
    row.sca_per_iteration = kScaSolveFlopsPerDim3 * per_iter;
    row.sca_composition =
        sca_composition_flops(n, static_cast<int>(group_sizes.size()), k_total);
    row.sca_total = flop_estimate_sca(n, group_sizes, sca_iterations);
    row.alg3 = flop_estimate_alg3(n, group_sizes);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mgmcast
