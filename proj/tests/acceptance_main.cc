// Copyright 2026 The ShardSim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. The CLI binary path is argv[1].

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "shardsim/api.h"
#include "shardsim/collectives.h"
#include "shardsim/planner.h"
#include "shardsim/scaling_law.h"
#include "shardsim/service.h"

namespace shardsim {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string Format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

std::string g_cli_path;

Scenario Llama(const char* model, int nodes, std::int64_t global_batch) {
  Scenario s;
  s.num_nodes = nodes;
  s.workload.arch = *ModelPreset(model);
  s.workload.seq_len = 4096;
  s.workload.global_batch = global_batch;
  return s;
}

double RelErr(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome CollectiveOracle() {
  constexpr double kBw = 50e9;
  constexpr double kAlpha = 5e-6;
  double worst = 0.0;
  int cases = 0;
  for (double payload : {1024.0, 1024.0 * 1024, kGiB}) {
    for (int g = 2; g <= 64; ++g) {
      for (CollectiveKind k :
           {CollectiveKind::kAllGather, CollectiveKind::kReduceScatter}) {
        const CommOp op{k, payload, g, Span::kCrossNode, true};
        worst = std::max(worst,
                         RelErr(RingTime(payload, g, kBw, kAlpha),
                                EventOracleTime(op, Algorithm::kRing, kBw,
                                                kAlpha)));
        ++cases;
      }
      const CommOp ar{CollectiveKind::kAllReduce, payload, g, Span::kCrossNode,
                      true};
      worst = std::max(worst, RelErr(TreeAllReduceTime(payload, g, kBw, kAlpha),
                                     EventOracleTime(ar, Algorithm::kTree, kBw,
                                                     kAlpha)));
      ++cases;
    }
  }
  return {worst < 1e-9, Format("%d cases, max rel err %.2e", cases, worst)};
}

Outcome FlopConservation() {
  constexpr int kWorld = 256;
  constexpr std::int64_t kGlobal = 512;
  int factorizations = 0;
  bool all_equal = true;
  for (const char* name : {"7b", "13b"}) {
    const TrainingWorkload w = Llama(name, 32, kGlobal).workload;
    std::uint64_t reference = 0;
    bool first = true;
    for (int tp = 1; tp <= kWorld; tp *= 2) {
      for (int pp = 1; tp * pp <= kWorld; pp *= 2) {
        const int dp = kWorld / (tp * pp);
        if (w.arch.num_heads % tp || w.arch.ffn_dim % tp ||
            w.arch.hidden_dim % tp || w.arch.num_layers % pp || kGlobal % dp) {
          continue;
        }
        std::uint64_t total = 0;
        for (int stage = 0; stage < pp; ++stage) {
          total += static_cast<std::uint64_t>(dp) * tp *
                   StageStepFlops(w, kGlobal / dp, tp, pp, stage);
        }
        if (first) reference = total;
        first = false;
        all_equal &= total == reference;
        ++factorizations;
      }
    }
    all_equal &= reference == StepFlops(w, kGlobal, 1);
  }
  return {all_equal && factorizations > 20,
          Format("%d factorizations, totals %s", factorizations,
                 all_equal ? "identical" : "differ")};
}

std::int64_t EnumerateTensors(const TransformerArch& a) {
  const std::int64_t h = a.hidden_dim;
  std::int64_t total = a.vocab_size * h + h;
  for (std::int64_t l = 0; l < a.num_layers; ++l) {
    total += 2 * h;                                  // norms
    total += 4 * h * h;                              // q, k, v, o
    total += 3 * h * a.ffn_dim;                      // gate, up, down
  }
  return total;
}

Outcome ParamCountOracle() {
  bool exact = ParamCount(TransformerArch{1, 1, 1, 1, 1, 1}) == 11;
  for (const std::string& name : ModelPresetNames()) {
    const TransformerArch a = *ModelPreset(name);
    exact &= ParamCount(a) == EnumerateTensors(a);
  }
  const double n = static_cast<double>(ParamCount(*ModelPreset("7b")));
  const double off = n / 6.74e9 - 1.0;
  return {exact && std::abs(off) <= 0.02,
          Format("enumeration %s, 7b = %.4g (%+.2f%%)",
                 exact ? "exact" : "MISMATCH", n, 100 * off)};
}

Outcome CostFactorIdentity() {
  const double identity = ShardCostFactor(3, 3, 1, 1, 0);
  const double a = ShardCostFactor(1, 2, 1.5, 2, 0);
  const double b = ShardCostFactor(1, 2, 2, 4, 0.3);
  const bool ok = identity == 1.0 && std::abs(a - 4.0 / 3.0) < 1e-12 &&
                  std::abs(b - 0.2) < 1e-12;
  return {ok, Format("c = %.17g, %.17g, %.17g", identity, a, b)};
}

const std::vector<int>& WeakLadder() {
  static const std::vector<int> nodes = {1, 2, 4, 8, 16, 32, 64, 128, 256};
  return nodes;
}

const SweepSeries& WeakSeries() {
  static const SweepSeries series =
      SweepWeak(Llama("7b", 1, 16), WeakLadder(), 2);
  return series;
}

Outcome WeakScaling() {
  const SweepSeries& s = WeakSeries();
  if (s.points.size() != WeakLadder().size()) return {false, "points missing"};
  bool monotone = true;
  for (size_t i = 1; i < s.points.size(); ++i) {
    monotone &= s.points[i].metrics.exposed_comm_fraction >=
                s.points[i - 1].metrics.exposed_comm_fraction;
  }
  double wps128 = 0.0, wps2048 = 0.0;
  for (const SweepPoint& p : s.points) {
    if (p.config.world_size() == 128) wps128 = p.metrics.wps_per_gpu;
    if (p.config.world_size() == 2048) wps2048 = p.metrics.wps_per_gpu;
  }
  const double decline = 1.0 - wps2048 / wps128;
  return {monotone && decline >= 0.20 && decline <= 0.55,
          Format("exposed fraction %s, %.3f -> %.3f; per-GPU WPS 128->2048 "
                 "down %.1f%%",
                 monotone ? "nondecreasing" : "NOT monotone",
                 s.points.front().metrics.exposed_comm_fraction,
                 s.points.back().metrics.exposed_comm_fraction,
                 100 * decline)};
}

Outcome CommunicationBoundCrossover() {
  int crossing = -1;
  for (const SweepPoint& p : WeakSeries().points) {
    if (p.metrics.exposed_comm_fraction > 0.25) {
      crossing = p.config.world_size();
      break;
    }
  }
  return {crossing >= 64 && crossing <= 512,
          Format("first world size above 0.25 exposed: %d", crossing)};
}

Outcome ModelParallelBenefit() {
  const PlanResult big = Plan(Llama("7b", 32, 512), PlanConstraints{});
  double fsdp = 0.0, small_mp = 0.0;
  int best_tp = 0, best_pp = 0;
  for (const PlanEntry& e : big.ranked) {
    const int p = e.config.parallelism_factor();
    if (p == 1) fsdp = std::max(fsdp, e.metrics.wps_global);
    if ((p == 2 || p == 4) && e.metrics.wps_global > small_mp) {
      small_mp = e.metrics.wps_global;
      best_tp = e.config.tp;
      best_pp = e.config.pp;
    }
  }
  const PlanResult one = Plan(Llama("7b", 1, 16), PlanConstraints{});
  const bool one_ok = one.feasible() && one.ranked.front().config.tp == 1 &&
                      one.ranked.front().config.pp == 1;
  return {fsdp > 0 && small_mp > fsdp && one_ok,
          Format("256 GPUs: tp%d pp%d %.4g wps vs fsdp %.4g; 1 node top "
                 "tp%d pp%d",
                 best_tp, best_pp, small_mp, fsdp,
                 one.feasible() ? one.ranked.front().config.tp : 0,
                 one.feasible() ? one.ranked.front().config.pp : 0)};
}

Outcome StrongScaling() {
  const std::vector<int> nodes = {2, 4, 8, 16, 32};
  const SweepSeries s =
      SweepStrong(Llama("7b", 2, 32), nodes, PlanConstraints{});
  if (s.points.size() != nodes.size()) return {false, "points missing"};
  bool decreasing = true;
  std::string mfus;
  for (size_t i = 0; i < s.points.size(); ++i) {
    if (i > 0) {
      decreasing &= s.points[i].metrics.mfu < s.points[i - 1].metrics.mfu;
    }
    mfus += Format("%s%.3f", i ? " " : "", s.points[i].metrics.mfu);
  }
  const double ratio =
      s.points.back().metrics.mfu / s.points.front().metrics.mfu;
  return {decreasing && ratio < 0.6,
          Format("mfu %s; 32/2 ratio %.3f", mfus.c_str(), ratio)};
}

Outcome HardwareDirection() {
  Scenario s = Llama("7b", 2, 32);
  s.parallelism.dp_shard = 16;
  s.parallelism.local_batch = 2;
  const SweepSeries r = SweepAlong(s, SweepAxis::kHardware, {"a100", "h100"},
                                   false, PlanConstraints{});
  if (r.points.size() != 2) return {false, "points missing"};
  const MetricsReport& a = r.points[0].metrics;
  const MetricsReport& h = r.points[1].metrics;
  return {h.mfu < a.mfu &&
              h.exposed_comm_fraction > a.exposed_comm_fraction,
          Format("mfu a100 %.3f h100 %.3f; exposed a100 %.3f h100 %.3f",
                 a.mfu, h.mfu, a.exposed_comm_fraction,
                 h.exposed_comm_fraction)};
}

Outcome ContextLengthDirection() {
  bool ok = true;
  std::string detail;
  for (int nodes : {2, 16, 64}) {
    Scenario s = Llama("7b", nodes, 16 * nodes);
    s.parallelism.dp_shard = 8 * nodes;
    s.parallelism.local_batch = 2;
    const SweepSeries r = SweepAlong(s, SweepAxis::kSeqLen,
                                     {"2048", "4096", "8192"}, false,
                                     PlanConstraints{});
    if (r.points.size() != 3) return {false, "points missing"};
    for (size_t i = 1; i < 3; ++i) {
      ok &= r.points[i].metrics.exposed_comm_fraction <
            r.points[i - 1].metrics.exposed_comm_fraction;
    }
    detail += Format("%s%d nodes %.3f>%.3f>%.3f", detail.empty() ? "" : "; ",
                     nodes, r.points[0].metrics.exposed_comm_fraction,
                     r.points[1].metrics.exposed_comm_fraction,
                     r.points[2].metrics.exposed_comm_fraction);
  }
  return {ok, detail};
}

Outcome MemoryDiminishingReturns() {
  const TrainingWorkload w = Llama("7b", 1, 1).workload;
  ParallelismConfig c;
  c.local_batch = 2;
  bool decreasing = true;
  double prev = INFINITY;
  for (int dp = 1; dp <= 128; dp *= 2) {
    c.dp_shard = dp;
    const double m = MemoryPerGpu(w, c).total();
    c.dp_shard = 2 * dp;
    const double gain = m - MemoryPerGpu(w, c).total();
    decreasing &= gain < prev;
    prev = gain;
  }
  c.dp_shard = 1;
  const double opt1 = MemoryPerGpu(w, c).optimizer;
  c.dp_shard = 8;
  const double opt8 = MemoryPerGpu(w, c).optimizer;
  return {decreasing && opt8 == opt1 / 8,
          Format("savings %s; optimizer dp8/dp1 = %.17g",
                 decreasing ? "strictly shrinking" : "NOT shrinking",
                 opt8 / opt1)};
}

Outcome PowerNearConstancy() {
  double pmin = INFINITY, pmax = 0.0, mmin = INFINITY, mmax = 0.0;
  for (const SweepPoint& p : WeakSeries().points) {
    pmin = std::min(pmin, p.metrics.power_per_gpu);
    pmax = std::max(pmax, p.metrics.power_per_gpu);
    mmin = std::min(mmin, p.metrics.mfu);
    mmax = std::max(mmax, p.metrics.mfu);
  }
  const double power_var = (pmax - pmin) / pmax;
  const double mfu_var = (mmax - mmin) / mmax;
  return {power_var <= 0.10 && mfu_var > 0.30,
          Format("power %.0f-%.0f W (%.1f%%); mfu %.3f-%.3f (%.1f%%)", pmin,
                 pmax, 100 * power_var, mmin, mmax, 100 * mfu_var)};
}

Outcome CalibrationRoundTrip() {
  constexpr double kAlpha = 5e-6;
  constexpr double kBeta = 50e9;
  double noiseless = 0.0, noisy = 0.0;
  for (double noise : {0.0, 0.02}) {
    std::vector<MeasuredBandwidthPoint> points;
    int i = 0;
    for (int g : {8, 16, 32, 64, 128, 256}) {
      for (double s : {65536.0, 1048576.0, 16777216.0, 268435456.0, kGiB}) {
        const double t =
            RingTime(s, g, kBeta, kAlpha) * (1.0 + noise * ((i++ % 3) - 1));
        points.push_back(
            {g, s, BusBandwidth(CollectiveKind::kAllGather, s, g, t)});
      }
    }
    const CostEntry* e =
        FitCostParams(points, CollectiveKind::kAllGather)
            .Find({CollectiveKind::kAllGather, Algorithm::kRing,
                   Span::kCrossNode});
    if (e == nullptr) return {false, "no fitted entry"};
    const double err =
        std::max(RelErr(e->alpha, kAlpha), RelErr(e->beta, kBeta));
    (noise == 0.0 ? noiseless : noisy) = err;
  }
  return {noiseless < 1e-9 && noisy < 0.05,
          Format("noiseless rel err %.2e, 2%% noise rel err %.2e", noiseless,
                 noisy)};
}

Outcome DirectionAgreement() {
  std::mt19937 rng(20261014);
  const int nodes_options[] = {1, 2, 4, 8, 16, 32, 64};
  const char* models[] = {"1b", "7b", "13b"};
  int agree = 0;
  int total = 0;
  while (total < 50) {
    Scenario s = Llama(models[rng() % 3], nodes_options[rng() % 7], 1);
    s.workload.global_batch =
        static_cast<std::int64_t>(s.num_nodes) * 8 * (1 << (rng() % 2));
    const ClusterTopology topology = s.topology();
    std::vector<ParallelismConfig> feasible;
    for (const ParallelismConfig& c :
         EnumerateConfigs(s.workload, topology, PlanConstraints{})) {
      if (c.global_batch() == s.workload.global_batch && c.local_batch >= 1 &&
          !HasErrors(Validate(c, topology, s.workload)) &&
          MemoryPerGpu(s.workload, c).total() <=
              topology.gpu().memory_capacity) {
        feasible.push_back(c);
      }
    }
    if (feasible.size() < 2) continue;
    const ParallelismConfig& a = feasible[rng() % feasible.size()];
    const ParallelismConfig& b = feasible[rng() % feasible.size()];
    const Decision d =
        Decide(s.workload, topology, a, b,
               CostParamsFor(topology, s.cost_overrides), s.knobs);
    ++total;
    agree += d.agrees ? 1 : 0;
  }
  const double share = static_cast<double>(agree) / total;
  return {share >= 0.9, Format("%d/%d sampled pairs agree", agree, total)};
}

Outcome CliApiParity() {
  if (g_cli_path.empty()) return {false, "CLI path not given"};
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "shardsim_acceptance";
  std::filesystem::create_directories(dir);
  const std::filesystem::path config = dir / "parity.json";
  const std::string body = R"({
  "hardware": {"preset": "h100", "num_nodes": 4},
  "model": {"preset": "7b"},
  "workload": {"global_batch": 64, "seq_len": 4096},
  "parallelism": {"dp_shard": 8, "tp": 2, "pp": 2, "local_batch": 8,
                  "microbatches": 4}
})";
  std::ofstream(config) << body;

  std::string cli_out;
  const std::string command =
      "\"" + g_cli_path + "\" simulate -c \"" + config.string() + "\"";
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return {false, "cannot run CLI"};
  std::array<char, 4096> buf;
  size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    cli_out.append(buf.data(), n);
  }
  const int status = pclose(pipe);

  Service service(ApiOptions{});
  const int port = service.BindToAnyPort("127.0.0.1");
  if (port <= 0) return {false, "cannot bind service"};
  std::thread server([&] { service.ListenAfterBind(); });
  service.WaitUntilReady();
  httplib::Client client("127.0.0.1", port);
  auto res = client.Post("/api/simulate", body, "application/json");
  service.Stop();
  server.join();
  std::filesystem::remove_all(dir);
  if (!res) return {false, "no HTTP response"};
  const bool same = status == 0 && res->status == 200 && res->body == cli_out;
  return {same, Format("CLI exit %d, HTTP %d, %zu vs %zu bytes, %s", status,
                       res->status, cli_out.size(), res->body.size(),
                       res->body == cli_out ? "identical" : "DIFFERENT")};
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

int RunAll() {
  const std::vector<Criterion> criteria = {
      {"collective oracle equivalence", 5, CollectiveOracle},
      {"FLOP conservation", 5, FlopConservation},
      {"param-count oracle", 1, ParamCountOracle},
      {"cost factor identity and examples", 1, CostFactorIdentity},
      {"weak-scaling trend", 30, WeakScaling},
      {"communication-bound crossover", 30, CommunicationBoundCrossover},
      {"model-parallel benefit", 60, ModelParallelBenefit},
      {"strong-scaling collapse", 60, StrongScaling},
      {"hardware-generation direction", 10, HardwareDirection},
      {"context-length direction", 10, ContextLengthDirection},
      {"memory diminishing returns", 5, MemoryDiminishingReturns},
      {"power near-constancy", 30, PowerNearConstancy},
      {"calibration round trip", 5, CalibrationRoundTrip},
      {"cost factor / simulator direction agreement", 60, DirectionAgreement},
      {"CLI/API parity", 5, CliApiParity},
  };
  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    const bool in_budget = seconds < c.budget_s;
    const bool pass = o.pass && in_budget;
    if (!pass) ++failures;
    std::printf("%s  %2d. %-44s %8.3f s  %s%s\n", pass ? "PASS" : "FAIL", index,
                c.name, seconds, o.detail.c_str(),
                in_budget ? "" : " (over time budget)");
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace shardsim

int main(int argc, char** argv) {
  if (argc > 1) shardsim::g_cli_path = argv[1];
  return shardsim::RunAll();
}
