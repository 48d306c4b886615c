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
//
// Command-line front end: Monte Carlo batches for the power-minimization
// (qos) and max-min (mmf) problems, ordering-policy comparisons, antenna
// sweeps, and flop reports. JSON config in, CSV out, deterministic under
// --seed.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgmcast/harness.hpp"
#include "mgmcast/rng.hpp"

using namespace mgmcast;
using nlohmann::json;

namespace {

OrderingPolicy parse_policy(const std::string& s) {
  if (s == "worst_first_ratio") return OrderingPolicy::kWorstFirstRatio;
  if (s == "worst_first_power") return OrderingPolicy::kWorstFirstPower;
  if (s == "best_first_ref12") return OrderingPolicy::kBestFirstRef12;
  throw CLI::ValidationError("--policy", "unknown ordering policy '" + s + "'");
}

Algo parse_algo(const std::string& s) {
  if (s == "sca") return Algo::kSca;
  if (s == "heuristic") return Algo::kHeuristic;
  if (s == "heuristic+sca") return Algo::kHeuristicWarmSca;
  throw CLI::ValidationError("--algo", "unknown algorithm '" + s + "'");
}

void load_config_json(const std::string& path, Scenario& s, bool& seed_from_config) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
  json doc = json::parse(f);

  if (doc.contains("config")) {
    const json& c = doc["config"];
    if (c.contains("n_antennas")) s.config.n_antennas = c["n_antennas"].get<int>();
    if (c.contains("group_sizes")) s.config.group_sizes = c["group_sizes"].get<std::vector<int>>();
    if (c.contains("cell_radius_m")) s.config.cell_radius_m = c["cell_radius_m"].get<double>();
    if (c.contains("exclusion_radius_m"))
      s.config.exclusion_radius_m = c["exclusion_radius_m"].get<double>();
    if (c.contains("noise_psd_dbm_hz"))
      s.config.noise_psd_dbm_hz = c["noise_psd_dbm_hz"].get<double>();
    if (c.contains("bandwidth_hz")) s.config.bandwidth_hz = c["bandwidth_hz"].get<double>();
    if (c.contains("noise_override_w"))
      s.config.noise_override_w = c["noise_override_w"].get<double>();
    if (c.contains("master_seed")) {
      s.config.master_seed = c["master_seed"].get<std::uint64_t>();
      seed_from_config = true;
    }
  }
  if (doc.contains("mode")) {
    const std::string m = doc["mode"].get<std::string>();
    if (m == "qos") s.mode = Mode::kQos;
    else if (m == "mmf") s.mode = Mode::kMmf;
    else throw std::runtime_error("config: unknown mode '" + m + "'");
  }
  if (doc.contains("eta")) s.eta = doc["eta"].get<double>();
  if (doc.contains("eta_per_group")) {
    s.eta_per_group.clear();
    for (const auto& arr : doc["eta_per_group"]) {
      const auto vals = arr.get<std::vector<double>>();
      Eigen::VectorXd v(vals.size());
      for (std::size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
      s.eta_per_group.push_back(std::move(v));
    }
  }
  if (doc.contains("power_budget")) s.power_budget = doc["power_budget"].get<double>();
  if (doc.contains("csi")) {
    const std::string m = doc["csi"].get<std::string>();
    if (m == "perfect") s.csi = CsiModel::kPerfect;
    else if (m == "mmse") s.csi = CsiModel::kMmse;
    else throw std::runtime_error("config: unknown csi model '" + m + "'");
  }
  if (doc.contains("pilot_power_w")) s.pilot_power_w = doc["pilot_power_w"].get<double>();
  if (doc.contains("pilot_len")) s.pilot_len = doc["pilot_len"].get<int>();
  if (doc.contains("trials")) s.trials = doc["trials"].get<int>();
  if (doc.contains("threads")) s.threads = doc["threads"].get<int>();
  OrderingPolicy policy = OrderingPolicy::kWorstFirstRatio;
  if (doc.contains("policy")) policy = parse_policy(doc["policy"].get<std::string>());
  if (doc.contains("algorithms")) {
    s.algorithms.clear();
    for (const auto& a : doc["algorithms"])
      s.algorithms.push_back({parse_algo(a.get<std::string>()), policy});
  } else if (doc.contains("policy")) {
    for (auto& spec : s.algorithms) spec.policy = policy;
  }
}

void print_summary(const ScenarioResult& res, Mode mode) {
  std::printf("%-34s %10s %10s %10s %10s %10s %8s %10s\n", "algorithm",
              mode == Mode::kQos ? "mean[W]" : "mean[t]", "stddev", "p5", "p50", "p95",
              "failures", "time[s]");
  for (const auto& s : res.summaries)
    std::printf("%-34s %10.6g %10.4g %10.6g %10.6g %10.6g %8d %10.4g\n",
                s.algorithm.c_str(), s.mean, s.stddev, s.percentiles[0], s.percentiles[2],
                s.percentiles[4], s.failures, s.mean_wall_time_s);
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  if (out.empty()) throw std::runtime_error("empty integer list '" + csv + "'");
  return out;
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct CommonFlags {
  std::string config_path;
  int n_antennas = -1;
  int groups = -1;
  int group_size = -1;
  double eta = -1.0;
  double power = -1.0;
  int trials = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::vector<std::string> algos;
  std::string policy;
  std::string csi;
  double pilot_power = -1.0;
  int pilot_len = -1;
  int threads = -1;
  std::string out_path;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON scenario file (flags override fields)");
  cmd->add_option("--n-antennas", f.n_antennas, "base-station antennas N");
  cmd->add_option("--groups", f.groups, "number of multicast groups G");
  cmd->add_option("--group-size", f.group_size, "users per group (uniform)");
  cmd->add_option("--eta", f.eta, "per-user SINR target (qos) / weight (mmf)");
  cmd->add_option("--power", f.power, "total power budget in watts (mmf)");
  cmd->add_option("--trials", f.trials, "number of Monte Carlo trials");
  cmd->add_option("--seed", f.seed, "master seed (required for reproducible runs)")
      ->each([&f](const std::string&) { f.seed_given = true; });
  cmd->add_option("--algo", f.algos, "algorithms: sca, heuristic, heuristic+sca")
      ->take_all();
  cmd->add_option("--policy", f.policy,
                  "ordering policy: worst_first_ratio, worst_first_power, best_first_ref12");
  cmd->add_option("--csi", f.csi, "channel knowledge: perfect or mmse");
  cmd->add_option("--pilot-power", f.pilot_power, "uplink pilot power in watts (mmse)");
  cmd->add_option("--pilot-len", f.pilot_len, "pilot length (default: total user count)");
  cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
  cmd->add_option("--out", f.out_path, "write per-trial records as CSV to this path");
}

Scenario build_scenario(const CommonFlags& f, Mode mode, bool& seeded) {
  Scenario s;
  s.mode = mode;
  bool seed_from_config = false;
  if (!f.config_path.empty()) load_config_json(f.config_path, s, seed_from_config);
  s.mode = mode;  // the subcommand wins over the config file
  if (f.n_antennas > 0) s.config.n_antennas = f.n_antennas;
  if (f.groups > 0 || f.group_size > 0) {
    const int g = f.groups > 0 ? f.groups : static_cast<int>(s.config.group_sizes.size());
    const int k = f.group_size > 0 ? f.group_size
                                   : (s.config.group_sizes.empty() ? 10 : s.config.group_sizes[0]);
    s.config.group_sizes.assign(g, k);
  }
  if (f.eta > 0) s.eta = f.eta;
  if (f.power > 0) s.power_budget = f.power;
  if (f.trials > 0) s.trials = f.trials;
  if (!f.csi.empty()) {
    if (f.csi == "perfect") s.csi = CsiModel::kPerfect;
    else if (f.csi == "mmse") s.csi = CsiModel::kMmse;
    else throw CLI::ValidationError("--csi", "unknown CSI model '" + f.csi + "'");
  }
  if (f.pilot_power > 0) s.pilot_power_w = f.pilot_power;
  if (f.pilot_len >= 0) s.pilot_len = f.pilot_len;
  if (f.threads >= 0) s.threads = f.threads;
  const OrderingPolicy policy =
      f.policy.empty() ? OrderingPolicy::kWorstFirstRatio : parse_policy(f.policy);
  if (!f.algos.empty()) {
    s.algorithms.clear();
    for (const auto& a : f.algos) s.algorithms.push_back({parse_algo(a), policy});
  } else if (!f.policy.empty()) {
    for (auto& spec : s.algorithms) spec.policy = policy;
  }
  if (f.seed_given) s.config.master_seed = f.seed;
  seeded = f.seed_given || seed_from_config;
  return s;
}

int run_batch(const CommonFlags& f, Mode mode) {
  bool seeded = false;
  Scenario s = build_scenario(f, mode, seeded);
  if (!seeded)
    std::cerr << "warning: no --seed given; using default master seed "
              << s.config.master_seed << " (pass --seed for reproducible runs)\n";
  const ScenarioResult res = run_scenario(s, s.config.master_seed);
  print_summary(res, s.mode);
  if (!f.out_path.empty()) {
    emit_csv(res.records, f.out_path);
    std::printf("wrote %zu records to %s\n", res.records.size(), f.out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mgmcast: two-layer multigroup multicast precoding simulator\n"
      "Null-space outer layer plus convex-approximation or successive inner layers,\n"
      "with closed-form conversions between the power-minimization and max-min problems."};
  app.require_subcommand(1);

  CommonFlags qos_flags, mmf_flags, cmp_flags, sweep_flags;
  std::string sweep_mode = "qos", n_list_str, policies_str;
  int flops_iters = 17;
  std::string flops_out;

  CLI::App* qos = app.add_subcommand("qos", "minimize transmit power under SINR targets");
  add_common_flags(qos, qos_flags);

  CLI::App* mmf = app.add_subcommand("mmf", "maximize the minimum weighted SINR under a power budget");
  add_common_flags(mmf, mmf_flags);

  CLI::App* cmp = app.add_subcommand("compare-ordering",
                                     "paired comparison of the successive heuristic's ordering policies");
  add_common_flags(cmp, cmp_flags);
  cmp->add_option("--policies", policies_str,
                  "comma-separated policies (default: all three)");

  CLI::App* sweep = app.add_subcommand("sweep", "rerun a scenario over a list of antenna counts");
  add_common_flags(sweep, sweep_flags);
  sweep->add_option("--n-list", n_list_str, "comma-separated antenna counts")->required();
  sweep->add_option("--mode", sweep_mode, "qos or mmf (default qos)");

  CLI::App* flops = app.add_subcommand("flops", "closed-form flop counts per antenna count");
  flops->add_option("--n-list", n_list_str, "comma-separated antenna counts")->required();
  CommonFlags flops_flags;
  flops->add_option("--groups", flops_flags.groups, "number of groups (default 3)");
  flops->add_option("--group-size", flops_flags.group_size, "users per group (default 10)");
  flops->add_option("--iters", flops_iters, "assumed convex-approximation iteration count");
  flops->add_option("--out", flops_out, "write the table as CSV to this path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (qos->parsed()) return run_batch(qos_flags, Mode::kQos);
    if (mmf->parsed()) return run_batch(mmf_flags, Mode::kMmf);

    if (cmp->parsed()) {
      bool seeded = false;
      if (cmp_flags.groups < 0 && cmp_flags.config_path.empty()) cmp_flags.groups = 1;
      if (cmp_flags.group_size < 0 && cmp_flags.config_path.empty()) cmp_flags.group_size = 20;
      Scenario s = build_scenario(cmp_flags, Mode::kQos, seeded);
      if (!seeded)
        std::cerr << "warning: no --seed given; using default master seed "
                  << s.config.master_seed << " (pass --seed for reproducible runs)\n";
      std::vector<OrderingPolicy> policies = {OrderingPolicy::kWorstFirstRatio,
                                              OrderingPolicy::kBestFirstRef12,
                                              OrderingPolicy::kWorstFirstPower};
      if (!policies_str.empty()) {
        policies.clear();
        std::stringstream ss(policies_str);
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty()) policies.push_back(parse_policy(item));
      }
      const ScenarioResult res =
          compare_ordering(s.config, s.eta, policies, s.trials, s.config.master_seed);
      print_summary(res, Mode::kQos);
      if (!cmp_flags.out_path.empty()) {
        emit_csv(res.records, cmp_flags.out_path);
        std::printf("wrote %zu records to %s\n", res.records.size(), cmp_flags.out_path.c_str());
      }
      return 0;
    }

    if (sweep->parsed()) {
      bool seeded = false;
      const Mode mode = sweep_mode == "mmf" ? Mode::kMmf : Mode::kQos;
      Scenario base = build_scenario(sweep_flags, mode, seeded);
      if (!seeded)
        std::cerr << "warning: no --seed given; using default master seed "
                  << base.config.master_seed << " (pass --seed for reproducible runs)\n";
      std::string csv =
          "n_antennas,algorithm,mean,stddev,p5,p25,p50,p75,p95,failures\n";
      for (int n : parse_int_list(n_list_str)) {
        Scenario s = base;
        s.config.n_antennas = n;
        // Fresh channels per antenna count, seeds derived from (seed, N).
        const ScenarioResult res =
            run_scenario(s, split_seed(s.config.master_seed, static_cast<std::uint64_t>(n)));
        std::printf("N = %d\n", n);
        print_summary(res, mode);
        for (const auto& sm : res.summaries) {
          csv += std::to_string(n) + "," + sm.algorithm + "," + format_g(sm.mean) + "," +
                 format_g(sm.stddev);
          for (double p : sm.percentiles) csv += "," + format_g(p);
          csv += "," + std::to_string(sm.failures) + "\n";
        }
      }
      if (!sweep_flags.out_path.empty()) {
        std::ofstream f(sweep_flags.out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open '" + sweep_flags.out_path + "'");
        f << csv;
        std::printf("wrote sweep summary to %s\n", sweep_flags.out_path.c_str());
      }
      return 0;
    }

    if (flops->parsed()) {
      std::vector<int> sizes(flops_flags.groups > 0 ? flops_flags.groups : 3,
                             flops_flags.group_size > 0 ? flops_flags.group_size : 10);
      std::string csv =
          "n_antennas,bdzf,sca_per_iteration,sca_composition,sca_total,alg3\n";
      for (const auto& row : report_flops(parse_int_list(n_list_str), sizes, flops_iters)) {
        csv += std::to_string(row.n_antennas) + "," + std::to_string(row.bdzf) + "," +
               std::to_string(row.sca_per_iteration) + "," +
               std::to_string(row.sca_composition) + "," + std::to_string(row.sca_total) +
               "," + std::to_string(row.alg3) + "\n";
      }
      if (flops_out.empty()) {
        std::fputs(csv.c_str(), stdout);
      } else {
        std::ofstream f(flops_out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open '" + flops_out + "'");
        f << csv;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
