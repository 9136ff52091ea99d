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


// Command-line front end: simulate, plan, sweep, decide, calibrate, serve.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shardsim/api.h"
#include "shardsim/errors.h"
#include "shardsim/io.h"
#include "shardsim/service.h"

namespace shardsim {
namespace {

namespace fs = std::filesystem;

constexpr int kExitInvalid = 1;

struct CommonFlags {
  std::string config_path;
  std::string hardware;
  std::string model;
  std::vector<int> nodes;
  std::string objective;
  std::string out_dir;
  std::string format = "json";
};

void AddCommon(CLI::App* cmd, CommonFlags* f, bool nodes_is_list) {
  cmd->add_option("-c,--config", f->config_path, "run config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--hardware", f->hardware, "hardware preset override")
      ->check(CLI::IsMember({"v100", "a100", "h100"}));
  cmd->add_option("--model", f->model, "model preset override")
      ->check(CLI::IsMember({"1b", "7b", "13b", "70b"}));
  auto* nodes = cmd->add_option("--nodes", f->nodes,
                                nodes_is_list ? "node-count ladder, e.g. 1,4,16"
                                              : "node count override")
                    ->delimiter(',')
                    ->check(CLI::PositiveNumber);
  if (!nodes_is_list) nodes->expected(1);
  cmd->add_option("--out", f->out_dir, "write artifacts into this directory");
}

Json LoadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Applies --hardware/--model/--nodes/--objective to the request JSON so the
// CLI and the API see the same document.
void ApplyOverrides(const CommonFlags& f, bool nodes_is_count, Json* j) {
  if (!j->is_object()) return;
  Json& r = *j;
  if (!f.hardware.empty()) {
    Json hw;
    hw["preset"] = f.hardware;
    hw["num_nodes"] = r.contains("hardware") && r["hardware"].is_object() &&
                              r["hardware"].contains("num_nodes")
                          ? r["hardware"]["num_nodes"]
                          : Json(1);
    r["hardware"] = hw;
  }
  if (!f.model.empty()) {
    Json m;
    m["preset"] = f.model;
    r["model"] = m;
  }
  if (nodes_is_count && !f.nodes.empty()) {
    if (!r.contains("hardware") || !r["hardware"].is_object()) {
      r["hardware"] = Json::object();
    }
    r["hardware"]["num_nodes"] = f.nodes.front();
  }
  if (!f.objective.empty()) {
    if (!r.contains("constraints") || !r["constraints"].is_object()) {
      r["constraints"] = Json::object();
    }
    r["constraints"]["objective"] = f.objective;
  }
}

ApiOptions OptionsFor(const std::string& config_path) {
  ApiOptions options;
  options.parse.base_dir = fs::absolute(config_path).parent_path();
  options.parse.allow_cost_params_path = true;
  // The CLI runs locally; no request cap.
  options.max_configs = 1 << 30;
  return options;
}

int Emit(const std::string& text, const CommonFlags& f,
         const std::string& stem, const std::string& ext) {
  if (f.out_dir.empty()) {
    std::cout << text;
    return 0;
  }
  fs::create_directories(f.out_dir);
  const fs::path path = fs::path(f.out_dir) / (stem + "." + ext);
  std::ofstream out(path);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << path.string() << "\n";
    return kExitInvalid;
  }
  std::cerr << "wrote " << path.string() << "\n";
  return 0;
}

int ReportErrors(const ApiResponse& r) {
  std::cout << Serialize(r.body);
  if (r.body.contains("errors")) {
    for (const Json& e : r.body["errors"]) {
      std::cerr << "error: " << e.value("path", std::string()) << ": "
                << e.value("message", std::string()) << "\n";
    }
  }
  return kExitInvalid;
}

ParsedConfig MustParse(const Json& request, const ApiOptions& options,
                       const std::vector<std::string>& extra) {
  ParsedConfig parsed = ParseRunConfig(request, options.parse, extra);
  if (!parsed.ok()) throw ConfigError("config became invalid after parsing");
  return parsed;
}

int RunSimulate(const CommonFlags& f) {
  Json request = LoadJson(f.config_path);
  ApplyOverrides(f, true, &request);
  const ApiOptions options = OptionsFor(f.config_path);
  const ApiResponse r = HandleSimulate(request, options);
  if (r.status != 200) return ReportErrors(r);
  // With --out, the JSON artifact is always written next to the formatted one.
  if (!f.out_dir.empty() || f.format == "json") {
    const int rc = Emit(Serialize(r.body), f, "simulate", "json");
    if (rc != 0 || f.format == "json") return rc;
  }
  const Json& result = r.body["result"];
  if (!result["feasible"].get<bool>()) {
    return Emit("infeasible: " + result["infeasibility"].get<std::string>() +
                    "\n",
                f, "simulate", "txt");
  }
  const Scenario s = MustParse(request, options, {}).scenario;
  const ClusterTopology topology = s.topology();
  const SimulationResult sim =
      SimulateStep(s.workload, s.parallelism, topology,
                   CostParamsFor(topology, s.cost_overrides), s.knobs);
  const MetricsReport m =
      ComputeMetrics(sim.breakdown, s.workload, s.parallelism, topology);
  return Emit(MetricsTable(sim.breakdown, m), f, "simulate", "txt");
}

int RunPlan(const CommonFlags& f) {
  Json request = LoadJson(f.config_path);
  ApplyOverrides(f, true, &request);
  const ApiOptions options = OptionsFor(f.config_path);
  const ApiResponse r = HandlePlan(request, options);
  if (r.status != 200) return ReportErrors(r);
  if (!f.out_dir.empty() || f.format == "json") {
    const int rc = Emit(Serialize(r.body), f, "plan", "json");
    if (rc != 0 || (f.format == "json" && f.out_dir.empty())) return rc;
  }
  ParsedConfig parsed = MustParse(request, options, {"constraints"});
  std::vector<Violation> ignored;
  const PlanConstraints constraints =
      request.contains("constraints")
          ? ParseConstraints(request["constraints"], "/constraints", &ignored)
          : PlanConstraints{};
  const PlanResult plan = Plan(parsed.scenario, constraints);
  if (f.format != "table") return Emit(PlanCsv(plan), f, "plan", "csv");
  return Emit(PlanTable(plan, 20), f, "plan", "txt");
}

struct SweepFlags {
  std::string axis;
  std::vector<std::string> values;
  bool replan = false;
  bool fixed = false;
};

int RunSweep(const CommonFlags& f, const SweepFlags& sf) {
  Json request = LoadJson(f.config_path);
  ApplyOverrides(f, false, &request);
  std::vector<std::string> values = sf.values;
  const bool node_axis = sf.axis == "world" || sf.axis == "strong";
  if (node_axis) {
    if (!values.empty()) {
      std::cerr << "error: use --nodes for the " << sf.axis << " axis\n";
      return kExitInvalid;
    }
    for (int n : f.nodes) values.push_back(std::to_string(n));
  } else if (!f.nodes.empty()) {
    if (request.contains("hardware") && request["hardware"].is_object()) {
      request["hardware"]["num_nodes"] = f.nodes.front();
    }
  }
  if (values.empty()) {
    std::cerr << "error: no sweep values (--nodes for world/strong, --values "
                 "otherwise)\n";
    return kExitInvalid;
  }
  Json sweep;
  sweep["axis"] = sf.axis;
  sweep["values"] = values;
  if (sf.replan) sweep["replan"] = true;
  if (sf.fixed) sweep["replan"] = false;
  request["sweep"] = sweep;
  const ApiOptions options = OptionsFor(f.config_path);
  const ApiResponse r = HandleSweep(request, options);
  if (r.status != 200) return ReportErrors(r);
  const std::string stem = "sweep_" + sf.axis;
  if (!f.out_dir.empty() || f.format == "json") {
    const int rc = Emit(Serialize(r.body), f, stem, "json");
    if (rc != 0 || (f.format == "json" && f.out_dir.empty())) return rc;
  }
  // Rebuild the series from the JSON result so CSV and JSON cannot drift.
  SweepSeries series;
  series.axis = *ParseSweepAxis(sf.axis);
  const Json& result = r.body["result"];
  for (const Json& p : result["points"]) {
    SweepPoint q;
    q.axis_value = p["axis_value"].get<double>();
    q.label = p["label"].get<std::string>();
    q.num_nodes = p["num_nodes"].get<int>();
    q.feasible = p["feasible"].get<bool>();
    const Json& c = p["config"];
    q.config.dp_shard = c["dp_shard"].get<int>();
    q.config.tp = c["tp"].get<int>();
    q.config.pp = c["pp"].get<int>();
    q.config.local_batch = c["local_batch"].get<std::int64_t>();
    q.config.num_microbatches = c["microbatches"].get<int>();
    q.config.grad_accum = c["grad_accum"].get<int>();
    q.config.sharding = *ParseShardingMode(c["sharding"].get<std::string>());
    const Json& b = p["breakdown"];
    q.breakdown.compute_time = b["compute_time"].get<double>();
    q.breakdown.comm_total = b["comm_total"].get<double>();
    q.breakdown.comm_exposed = b["comm_exposed"].get<double>();
    q.breakdown.bubble_time = b["bubble_time"].get<double>();
    q.breakdown.step_time = b["step_time"].get<double>();
    const Json& m = p["metrics"];
    q.metrics.wps_global = m["wps_global"].get<double>();
    q.metrics.wps_per_gpu = m["wps_per_gpu"].get<double>();
    q.metrics.mfu = m["mfu"].get<double>();
    q.metrics.observed_flops_per_gpu = m["observed_flops_per_gpu"].get<double>();
    q.metrics.power_per_gpu = m["power_per_gpu"].get<double>();
    q.metrics.tokens_per_watt = m["tokens_per_watt"].get<double>();
    q.metrics.memory_per_gpu_bytes = m["memory_per_gpu_bytes"].get<double>();
    q.metrics.exposed_comm_fraction = m["exposed_comm_fraction"].get<double>();
    if (p.contains("wps_ideal")) q.wps_ideal = p["wps_ideal"].get<double>();
    series.points.push_back(q);
  }
  for (const Json& n : result["notices"]) {
    series.notices.push_back(n.get<std::string>());
    std::cerr << "notice: " << n.get<std::string>() << "\n";
  }
  if (f.format != "table") return Emit(SweepCsv(series), f, stem, "csv");
  return Emit(SweepTable(series), f, stem, "txt");
}

int RunDecide(const std::string& from, const std::string& to,
              const CommonFlags& f) {
  Json request;
  request["from"] = LoadJson(from);
  request["to"] = LoadJson(to);
  ApplyOverrides(f, true, &request["from"]);
  ApplyOverrides(f, true, &request["to"]);
  const ApiResponse r = HandleDecide(request, OptionsFor(from));
  if (r.status != 200) return ReportErrors(r);
  if (f.format == "json") return Emit(Serialize(r.body), f, "decide", "json");
  const Json& d = r.body["result"];
  std::ostringstream out;
  out << "c           " << d["scaling"]["c"].dump() << "\n"
      << "s_b         " << d["scaling"]["s_b"].dump() << "\n"
      << "s_c         " << d["scaling"]["s_c"].dump() << "\n"
      << "ell         " << d["scaling"]["ell"].dump() << "\n"
      << "improves    " << (d["improves"].get<bool>() ? "yes" : "no") << "\n"
      << "wps ratio   " << d["simulated_throughput_ratio"].dump() << "\n"
      << "agrees      " << (d["agrees"].get<bool>() ? "yes" : "no") << "\n";
  return Emit(out.str(), f, "decide", "txt");
}

int RunCalibrate(const std::string& input, const std::string& span_name,
                 const CommonFlags& f) {
  std::ifstream in(input);
  if (!in) throw ConfigError("cannot read " + input);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::vector<BenchmarkRow> rows = ParseBenchmarkCsv(buf.str());
  const Span span =
      span_name == "intra_node" ? Span::kIntraNode : Span::kCrossNode;
  std::map<CollectiveKind, std::vector<MeasuredBandwidthPoint>> by_kind;
  for (const BenchmarkRow& row : rows) by_kind[row.kind].push_back(row.point);
  CollectiveCostParams params;
  for (const auto& [kind, points] : by_kind) {
    params.MergeFrom(FitCostParams(points, kind, span));
  }
  if (f.format == "csv") return Emit(CostParamsCsv(params), f, "cost_params", "csv");
  return Emit(Serialize(ToJson(params)), f, "cost_params", "json");
}

int RunServe(const std::string& host, int port) {
  Service service(ApiOptions{});
  std::cerr << "shardsim " << kEngineVersion << " listening on " << host << ":"
            << port << "\n";
  if (!service.Listen(host, port)) {
    std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
    return kExitInvalid;
  }
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Analytical performance simulator and parallelism planner for "
               "sharded transformer training"};
  app.set_version_flag("--version", std::string(kEngineVersion));
  app.require_subcommand(1);

  CommonFlags sim_flags, plan_flags, sweep_flags, decide_flags, cal_flags;

  auto* simulate = app.add_subcommand("simulate", "simulate one step");
  AddCommon(simulate, &sim_flags, false);
  simulate->add_option("--format", sim_flags.format)
      ->check(CLI::IsMember({"json", "table"}));

  auto* plan = app.add_subcommand("plan", "rank parallelism configs");
  AddCommon(plan, &plan_flags, false);
  plan->add_option("--objective", plan_flags.objective)
      ->check(CLI::IsMember({"throughput", "energy"}));
  plan->add_option("--format", plan_flags.format)
      ->check(CLI::IsMember({"json", "csv", "table"}));

  SweepFlags sf;
  auto* sweep = app.add_subcommand("sweep", "sweep one axis");
  AddCommon(sweep, &sweep_flags, true);
  sweep->add_option("--axis", sf.axis, "world, strong, batch, model, seqlen, hw")
      ->required()
      ->check(CLI::IsMember({"world", "strong", "batch", "model", "seqlen", "hw"}));
  sweep->add_option("--values", sf.values, "axis values for batch/model/seqlen/hw")
      ->delimiter(',');
  auto* replan = sweep->add_flag("--replan", sf.replan, "best plan per point");
  sweep->add_flag("--fixed", sf.fixed, "reuse the config's parallelism")
      ->excludes(replan);
  sweep->add_option("--objective", sweep_flags.objective)
      ->check(CLI::IsMember({"throughput", "energy"}));
  sweep->add_option("--format", sweep_flags.format)
      ->check(CLI::IsMember({"json", "csv", "table"}));

  std::string from, to;
  auto* decide = app.add_subcommand("decide", "compare two configs");
  decide->add_option("--from", from, "config at parallelism p")
      ->required()
      ->check(CLI::ExistingFile);
  decide->add_option("--to", to, "config at parallelism p'")
      ->required()
      ->check(CLI::ExistingFile);
  decide->add_option("--hardware", decide_flags.hardware)
      ->check(CLI::IsMember({"v100", "a100", "h100"}));
  decide->add_option("--model", decide_flags.model)
      ->check(CLI::IsMember({"1b", "7b", "13b", "70b"}));
  decide->add_option("--out", decide_flags.out_dir);
  decide->add_option("--format", decide_flags.format)
      ->check(CLI::IsMember({"json", "table"}));

  std::string input, span = "cross_node";
  auto* calibrate =
      app.add_subcommand("calibrate", "fit cost parameters from benchmarks");
  calibrate->add_option("--input", input, "benchmark CSV")
      ->required()
      ->check(CLI::ExistingFile);
  calibrate->add_option("--span", span)
      ->check(CLI::IsMember({"intra_node", "cross_node"}));
  calibrate->add_option("--out", cal_flags.out_dir);
  calibrate->add_option("--format", cal_flags.format)
      ->check(CLI::IsMember({"json", "csv"}));

  std::string host = "0.0.0.0";
  int port = PortFromEnvironment();
  auto* serve = app.add_subcommand("serve", "start the HTTP API");
  serve->add_option("--host", host);
  serve->add_option("--port", port, "defaults to SHARDSIM_PORT or 8080")
      ->check(CLI::Range(1, 65535));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return RunSimulate(sim_flags);
    if (*plan) return RunPlan(plan_flags);
    if (*sweep) return RunSweep(sweep_flags, sf);
    if (*decide) return RunDecide(from, to, decide_flags);
    if (*calibrate) return RunCalibrate(input, span, cal_flags);
    if (*serve) return RunServe(host, port);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const FitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return 0;
}

}  // namespace
}  // namespace shardsim

int main(int argc, char** argv) { return shardsim::Main(argc, argv); }
