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

#ifndef SHARDSIM_IO_H_
#define SHARDSIM_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "shardsim/collectives.h"
#include "shardsim/engine.h"
#include "shardsim/metrics.h"
#include "shardsim/parallelism.h"
#include "shardsim/planner.h"
#include "shardsim/scaling_law.h"
#include "shardsim/scenario.h"

namespace shardsim {

using Json = nlohmann::ordered_json;

inline constexpr char kEngineVersion[] = "0.1.0";

// Rounds to `digits` significant digits; all emitted floats go through it.
double RoundSignificant(double value, int digits = 6);
// Rounded number, or null when not finite.
Json Number(double value);

struct ParseOptions {
  // Directory against which a cost_params file path resolves. Empty
  // disables file references.
  std::filesystem::path base_dir;
  bool allow_cost_params_path = true;
};

struct ParsedConfig {
  Scenario scenario;
  bool has_parallelism = false;
  std::vector<Violation> errors;

  bool ok() const { return errors.empty(); }
};

// Top-level keys besides the run-config blocks that the caller accepts
// (for example "constraints" or "sweep").
ParsedConfig ParseRunConfig(const Json& config, const ParseOptions& options,
                            const std::vector<std::string>& extra_keys = {});

CollectiveCostParams ParseCostParams(const Json& j, const std::string& path,
                                     std::vector<Violation>* errors);
PlanConstraints ParseConstraints(const Json& j, const std::string& path,
                                 std::vector<Violation>* errors);

Json ToJson(const NodeSpec& node);
Json ToJson(const TransformerArch& arch);
Json ToJson(const ParallelismConfig& config);
Json ToJson(const Knobs& knobs);
Json ToJson(const CollectiveCostParams& params);
Json ToJson(const MemoryBreakdown& memory);
Json ToJson(const StepBreakdown& breakdown, bool with_phases);
Json ToJson(const MetricsReport& metrics);
Json ToJson(const PlanConstraints& constraints);
Json ToJson(const PlanResult& plan);
Json ToJson(const SweepSeries& series);
Json ToJson(const ShardScaling& scaling);
Json ToJson(const Decision& decision);
Json ToJson(const std::vector<Violation>& violations);

// Fully expanded run config that re-parses to the same scenario.
Json ScenarioToJson(const Scenario& scenario, bool with_parallelism);

Json ResultEnvelope(Json result);
Json ErrorEnvelope(const std::vector<Violation>& errors);

std::string SweepCsv(const SweepSeries& series);
std::string PlanCsv(const PlanResult& plan);
std::string CostParamsCsv(const CollectiveCostParams& params);

// Aligned two-column text for a single simulation.
std::string MetricsTable(const StepBreakdown& breakdown,
                         const MetricsReport& metrics);
std::string SweepTable(const SweepSeries& series);
std::string PlanTable(const PlanResult& plan, int max_rows);

// Bandwidth measurements: kind,group_size,message_bytes,
// bus_bandwidth_bytes_per_s. Throws ConfigError with the offending line.
struct BenchmarkRow {
  CollectiveKind kind;
  MeasuredBandwidthPoint point;
};
std::vector<BenchmarkRow> ParseBenchmarkCsv(const std::string& text);

}  // namespace shardsim

#endif  // SHARDSIM_IO_H_
