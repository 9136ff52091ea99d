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


#include "shardsim/io.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "shardsim/errors.h"

namespace shardsim {
namespace {

Json SampleConfig() {
  return Json::parse(R"({
    "hardware": {"preset": "h100", "num_nodes": 32},
    "model": {"preset": "7b"},
    "workload": {"global_batch": 512, "seq_len": 4096},
    "parallelism": {"dp_shard": 64, "tp": 2, "pp": 2, "local_batch": 8,
                    "microbatches": 8}
  })");
}

bool HasError(const std::vector<Violation>& v, const std::string& path,
              const std::string& text = "") {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) {
    return x.path == path && x.message.find(text) != std::string::npos;
  });
}

TEST(RoundSignificantTest, SixDigits) {
  EXPECT_DOUBLE_EQ(RoundSignificant(3.14159265), 3.14159);
  EXPECT_DOUBLE_EQ(RoundSignificant(123456789.0), 123457000.0);
  EXPECT_EQ(RoundSignificant(0.0), 0.0);
  EXPECT_TRUE(Number(INFINITY).is_null());
  EXPECT_TRUE(Number(NAN).is_null());
}

TEST(ParseRunConfigTest, PresetsAndDefaults) {
  const ParsedConfig p = ParseRunConfig(SampleConfig(), ParseOptions{});
  ASSERT_TRUE(p.ok()) << p.errors.front().path << p.errors.front().message;
  EXPECT_TRUE(p.has_parallelism);
  const Scenario& s = p.scenario;
  EXPECT_EQ(s.num_nodes, 32);
  EXPECT_EQ(s.node.gpu.name, Preset(Generation::kH100).gpu.name);
  EXPECT_EQ(s.workload.arch.hidden_dim, 4096);
  EXPECT_EQ(s.parallelism.num_microbatches, 8);
  EXPECT_EQ(s.parallelism.grad_accum, 1);
  EXPECT_EQ(s.knobs, Knobs{});
  EXPECT_TRUE(s.cost_overrides.entries().empty());
}

TEST(ParseRunConfigTest, GlobalBatchDerivedFromParallelism) {
  Json j = SampleConfig();
  j["workload"].erase("global_batch");
  const ParsedConfig p = ParseRunConfig(j, ParseOptions{});
  ASSERT_TRUE(p.ok());
  EXPECT_EQ(p.scenario.workload.global_batch, 512);
}

TEST(ParseRunConfigTest, RoundTripsThroughJson) {
  Json j = SampleConfig();
  j["knobs"] = {{"compute_efficiency", 0.5}, {"s_b_exponent", 0.9}};
  j["parallelism"]["sharding"] = "zero3";
  const ParsedConfig a = ParseRunConfig(j, ParseOptions{});
  ASSERT_TRUE(a.ok());
  const Json echoed = ScenarioToJson(a.scenario, true);
  const ParsedConfig b = ParseRunConfig(echoed, ParseOptions{});
  ASSERT_TRUE(b.ok()) << b.errors.front().path << " " << b.errors.front().message;
  EXPECT_EQ(ScenarioToJson(b.scenario, true), echoed);
  EXPECT_EQ(b.scenario.parallelism, a.scenario.parallelism);
  EXPECT_EQ(b.scenario.knobs, a.scenario.knobs);
  EXPECT_EQ(b.scenario.workload.arch.num_layers, 32);
}

TEST(ParseRunConfigTest, ListsEveryViolationWithPaths) {
  Json j = SampleConfig();
  j["parallelism"]["dp_shard"] = 100;
  j["model"]["bogus"] = 1;
  j["knobs"] = {{"compute_efficiency", 2.0}};
  const ParsedConfig p = ParseRunConfig(j, ParseOptions{});
  EXPECT_FALSE(p.ok());
  EXPECT_TRUE(HasError(p.errors, "/model/bogus", "unknown field"));
  EXPECT_TRUE(HasError(p.errors, "/knobs", "compute_efficiency"));
}

TEST(ParseRunConfigTest, ProductMismatchReported) {
  Json j = SampleConfig();
  j["parallelism"]["dp_shard"] = 100;
  j["workload"]["global_batch"] = 800;
  const ParsedConfig p = ParseRunConfig(j, ParseOptions{});
  EXPECT_TRUE(HasError(p.errors, "/parallelism", "product mismatch"));
}

TEST(ParseRunConfigTest, TypeErrors) {
  Json j = SampleConfig();
  j["hardware"]["num_nodes"] = "many";
  j["parallelism"]["tp"] = 1.5;
  const ParsedConfig p = ParseRunConfig(j, ParseOptions{});
  EXPECT_TRUE(HasError(p.errors, "/hardware/num_nodes", "expected an integer"));
  EXPECT_TRUE(HasError(p.errors, "/parallelism/tp", "expected an integer"));
}

TEST(ParseRunConfigTest, MissingBlocks) {
  const ParsedConfig p = ParseRunConfig(Json::object(), ParseOptions{});
  EXPECT_TRUE(HasError(p.errors, "/hardware", "required"));
  EXPECT_TRUE(HasError(p.errors, "/model", "required"));
  const ParsedConfig q = ParseRunConfig(Json::array(), ParseOptions{});
  EXPECT_TRUE(HasError(q.errors, "/", "expected an object"));
}

TEST(ParseRunConfigTest, UnknownPresets) {
  Json j = SampleConfig();
  j["hardware"]["preset"] = "b200";
  j["model"]["preset"] = "405b";
  const ParsedConfig p = ParseRunConfig(j, ParseOptions{});
  EXPECT_TRUE(HasError(p.errors, "/hardware/preset", "unknown"));
  EXPECT_TRUE(HasError(p.errors, "/model/preset", "unknown"));
}

TEST(ParseRunConfigTest, CustomHardwareNeedsEveryField) {
  Json j = SampleConfig();
  j["hardware"] = {{"num_nodes", 1}, {"gpu", {{"peak_flops", 1e15}}}};
  const ParsedConfig p = ParseRunConfig(j, ParseOptions{});
  EXPECT_TRUE(HasError(p.errors, "/hardware/internode_bandwidth", "required"));
  EXPECT_TRUE(HasError(p.errors, "/hardware/gpu/memory_capacity", "required"));
}

TEST(ParseRunConfigTest, PresetFieldsCanBeOverridden) {
  Json j = SampleConfig();
  j["hardware"]["gpus_per_node"] = 4;
  j["hardware"]["num_nodes"] = 64;
  j["hardware"]["gpu"] = {{"memory_capacity", 40e9}};
  const ParsedConfig p = ParseRunConfig(j, ParseOptions{});
  ASSERT_TRUE(p.ok());
  EXPECT_EQ(p.scenario.node.gpus_per_node, 4);
  EXPECT_DOUBLE_EQ(p.scenario.node.gpu.memory_capacity, 40e9);
  EXPECT_DOUBLE_EQ(p.scenario.node.gpu.peak_flops,
                   Preset(Generation::kH100).gpu.peak_flops);
}

TEST(ParseRunConfigTest, ExtraKeysAreTolerated) {
  Json j = SampleConfig();
  j["sweep"] = {{"axis", "world"}};
  EXPECT_FALSE(ParseRunConfig(j, ParseOptions{}).ok());
  EXPECT_TRUE(ParseRunConfig(j, ParseOptions{}, {"sweep"}).ok());
}

TEST(CostParamsTest, InlineRoundTrip) {
  CollectiveCostParams params;
  params.allreduce_cross = Algorithm::kRing;
  params.calibrated = true;
  params.Set({CollectiveKind::kAllGather, Algorithm::kRing, Span::kCrossNode},
             {5e-6, 40e9, {{16, 1e6, 10e9}, {16, 1e9, 38e9}}});
  const Json j = ToJson(params);
  std::vector<Violation> errors;
  const CollectiveCostParams back = ParseCostParams(j, "/cost_params", &errors);
  ASSERT_TRUE(errors.empty()) << errors.front().message;
  EXPECT_EQ(ToJson(back), j);
  EXPECT_EQ(back.allreduce_cross, Algorithm::kRing);
  const CostEntry* e = back.Find(
      {CollectiveKind::kAllGather, Algorithm::kRing, Span::kCrossNode});
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->measured_curve.size(), 2u);
}

TEST(CostParamsTest, BadEntries) {
  const Json j = Json::parse(R"({"entries": [
      {"kind": "broadcast", "algorithm": "ring", "span": "cross_node",
       "alpha": 1e-6, "beta": 1e9},
      {"kind": "AllGather", "algorithm": "ring", "span": "intra_node",
       "alpha": 1e-6, "beta": 0}]})");
  std::vector<Violation> errors;
  ParseCostParams(j, "/cost_params", &errors);
  EXPECT_TRUE(HasError(errors, "/cost_params/entries/0/kind", "unknown"));
  EXPECT_TRUE(HasError(errors, "/cost_params/entries/1/beta", "> 0"));
}

TEST(CostParamsTest, FileReferenceResolvesAgainstBaseDir) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "shardsim_io_test";
  std::filesystem::create_directories(dir);
  CollectiveCostParams params;
  params.Set({CollectiveKind::kAllGather, Algorithm::kRing, Span::kCrossNode},
             {1e-5, 10e9, {}});
  std::ofstream(dir / "cal.json") << ToJson(params).dump();
  Json j = SampleConfig();
  j["cost_params"] = "cal.json";
  ParseOptions options;
  options.base_dir = dir;
  const ParsedConfig p = ParseRunConfig(j, options);
  ASSERT_TRUE(p.ok()) << p.errors.front().message;
  EXPECT_NE(p.scenario.cost_overrides.Find({CollectiveKind::kAllGather,
                                            Algorithm::kRing,
                                            Span::kCrossNode}),
            nullptr);
  options.allow_cost_params_path = false;
  EXPECT_TRUE(HasError(ParseRunConfig(j, options).errors, "/cost_params",
                       "not accepted"));
  j["cost_params"] = "missing.json";
  options.allow_cost_params_path = true;
  EXPECT_TRUE(
      HasError(ParseRunConfig(j, options).errors, "/cost_params", "cannot read"));
  std::filesystem::remove_all(dir);
}

TEST(ConstraintsTest, ParseAndEcho) {
  const Json j = Json::parse(R"({"max_tp": 4, "max_pp": 2,
      "memory_cap_bytes": 4e10, "grad_accum": [1, 2], "objective": "energy"})");
  std::vector<Violation> errors;
  const PlanConstraints c = ParseConstraints(j, "/constraints", &errors);
  ASSERT_TRUE(errors.empty());
  EXPECT_EQ(c.max_tp, 4);
  EXPECT_EQ(c.grad_accum, (std::vector<int>{1, 2}));
  EXPECT_EQ(c.objective, Objective::kEnergy);
  EXPECT_DOUBLE_EQ(*c.memory_cap, 4e10);
  EXPECT_EQ(ToJson(c)["objective"], "energy");
}

TEST(ConstraintsTest, Errors) {
  const Json j = Json::parse(R"({"max_tp": 0, "grad_accum": [],
      "objective": "speed", "extra": true})");
  std::vector<Violation> errors;
  ParseConstraints(j, "/constraints", &errors);
  EXPECT_TRUE(HasError(errors, "/constraints/max_tp"));
  EXPECT_TRUE(HasError(errors, "/constraints/grad_accum"));
  EXPECT_TRUE(HasError(errors, "/constraints/objective"));
  EXPECT_TRUE(HasError(errors, "/constraints/extra", "unknown field"));
}

TEST(EnvelopeTest, Shape) {
  const Json ok = ResultEnvelope(Json{{"x", 1}});
  EXPECT_EQ(ok["engine_version"], kEngineVersion);
  EXPECT_EQ(ok["result"]["x"], 1);
  const Json err = ErrorEnvelope({{"/a", "bad", Violation::Severity::kError}});
  EXPECT_EQ(err["errors"][0]["path"], "/a");
  EXPECT_EQ(err["errors"][0]["severity"], "error");
  EXPECT_FALSE(err.contains("result"));
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

size_t Columns(const std::string& line) {
  return static_cast<size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

TEST(CsvTest, SweepHasOneRowPerPoint) {
  Scenario s;
  s.workload.arch = *ModelPreset("1b");
  s.workload.seq_len = 2048;
  s.parallelism.local_batch = 2;
  const SweepSeries series = SweepWeak(s, {1, 2, 4}, 2);
  const std::vector<std::string> lines = Lines(SweepCsv(series));
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0].rfind("axis,axis_value,label,num_nodes,world_size", 0),
            0u);
  for (const std::string& l : lines) EXPECT_EQ(Columns(l), Columns(lines[0]));
  EXPECT_EQ(lines[1].rfind("world,8,1,1,8,true,8,1,1,2,1,1,zero2,", 0), 0u);
}

TEST(CsvTest, PlanAndCostParams) {
  Scenario s;
  s.workload.arch = *ModelPreset("1b");
  s.workload.global_batch = 16;
  const PlanResult plan = Plan(s, PlanConstraints{});
  const std::vector<std::string> lines = Lines(PlanCsv(plan));
  EXPECT_EQ(lines.size(), plan.ranked.size() + 1);
  EXPECT_EQ(lines[1].rfind("1,", 0), 0u);
  const std::vector<std::string> cost =
      Lines(CostParamsCsv(DefaultCostParams(ClusterTopology(s.node, 2))));
  EXPECT_EQ(cost[0], "kind,algorithm,span,alpha_s,beta_bytes_per_s,measured_points");
  EXPECT_GT(cost.size(), 4u);
}

TEST(TableTest, MetricsTableHasEveryField) {
  const std::string t = MetricsTable(StepBreakdown{}, MetricsReport{});
  for (const char* key : {"step_time_s", "wps_global", "mfu", "power_per_gpu_w",
                          "exposed_comm_fraction"}) {
    EXPECT_NE(t.find(key), std::string::npos) << key;
  }
  EXPECT_EQ(PlanTable(PlanResult{}, 5), "no feasible configuration\n");
}

TEST(BenchmarkCsvTest, ParsesRows) {
  const auto rows = ParseBenchmarkCsv(
      "# fixture\n"
      "kind,group_size,message_bytes,bus_bandwidth_bytes_per_s\n"
      "AllGather,16,1048576,1.2e10\r\n"
      "AllReduce,32,1073741824,4.1e10\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].kind, CollectiveKind::kAllGather);
  EXPECT_EQ(rows[1].point.group_size, 32);
  EXPECT_DOUBLE_EQ(rows[1].point.bus_bandwidth, 4.1e10);
}

TEST(BenchmarkCsvTest, RejectsMalformedInput) {
  EXPECT_THROW(ParseBenchmarkCsv(""), ConfigError);
  EXPECT_THROW(ParseBenchmarkCsv("a,b,c,d\n"), ConfigError);
  const std::string header =
      "kind,group_size,message_bytes,bus_bandwidth_bytes_per_s\n";
  EXPECT_THROW(ParseBenchmarkCsv(header + "AllGather,1,10,10\n"), ConfigError);
  EXPECT_THROW(ParseBenchmarkCsv(header + "gather,4,10,10\n"), ConfigError);
  EXPECT_THROW(ParseBenchmarkCsv(header + "AllGather,4,-1,10\n"), ConfigError);
  EXPECT_THROW(ParseBenchmarkCsv(header + "AllGather,4,10\n"), ConfigError);
}

}  // namespace
}  // namespace shardsim
