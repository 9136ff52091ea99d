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


#include "shardsim/planner.h"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "shardsim/errors.h"

namespace shardsim {

std::string_view ObjectiveName(Objective objective) {
  return objective == Objective::kEnergy ? "energy" : "throughput";
}

std::optional<Objective> ParseObjective(std::string_view name) {
  if (name == "throughput") return Objective::kThroughput;
  if (name == "energy") return Objective::kEnergy;
  return std::nullopt;
}

std::vector<int> MicrobatchLadder(int pp) {
  if (pp <= 1) return {1};
  std::vector<int> ladder;
  for (int m : {1, 2, 4, 8, pp, 2 * pp, 4 * pp}) {
    if (m >= pp) ladder.push_back(m);
  }
  std::sort(ladder.begin(), ladder.end());
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());
  return ladder;
}

std::vector<ParallelismConfig> EnumerateConfigs(
    const TrainingWorkload& workload, const ClusterTopology& topology,
    const PlanConstraints& constraints) {
  std::vector<ParallelismConfig> out;
  const int world = topology.world_size();
  const TransformerArch& arch = workload.arch;
  for (int tp : kDegreeLadder) {
    if (tp > constraints.max_tp || arch.num_heads % tp != 0 ||
        arch.ffn_dim % tp != 0) {
      continue;
    }
    for (int pp : kDegreeLadder) {
      if (pp > constraints.max_pp || arch.num_layers % pp != 0) continue;
      if (world % (tp * pp) != 0) continue;
      const int dp = world / (tp * pp);
      for (int accum : constraints.grad_accum) {
        for (int m : MicrobatchLadder(pp)) {
          ParallelismConfig c;
          c.dp_shard = dp;
          c.tp = tp;
          c.pp = pp;
          c.grad_accum = accum;
          c.num_microbatches = m;
          c.sharding = constraints.sharding;
          const std::int64_t per_replica =
              static_cast<std::int64_t>(dp) * accum;
          c.local_batch = per_replica > 0 ? workload.global_batch / per_replica
                                          : 0;
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

bool RanksAhead(const PlanEntry& a, const PlanEntry& b, Objective objective) {
  const MetricsReport& x = a.metrics;
  const MetricsReport& y = b.metrics;
  if (objective == Objective::kEnergy &&
      x.tokens_per_watt != y.tokens_per_watt) {
    return x.tokens_per_watt > y.tokens_per_watt;
  }
  if (x.wps_global != y.wps_global) return x.wps_global > y.wps_global;
  if (x.power_per_gpu != y.power_per_gpu) {
    return x.power_per_gpu < y.power_per_gpu;
  }
  const ParallelismConfig& c = a.config;
  const ParallelismConfig& d = b.config;
  if (c.parallelism_factor() != d.parallelism_factor()) {
    return c.parallelism_factor() < d.parallelism_factor();
  }
  if (c.tp != d.tp) return c.tp < d.tp;
  if (c.grad_accum != d.grad_accum) return c.grad_accum < d.grad_accum;
  return c.num_microbatches < d.num_microbatches;
}

PlanResult Plan(const Scenario& scenario, const PlanConstraints& constraints) {
  const ClusterTopology topology = scenario.topology();
  const CollectiveCostParams params =
      CostParamsFor(topology, scenario.cost_overrides);
  const TrainingWorkload& workload = scenario.workload;
  const double memory_cap =
      constraints.memory_cap.value_or(topology.gpu().memory_capacity);

  PlanResult result;
  result.constraints = constraints;
  for (const ParallelismConfig& config :
       EnumerateConfigs(workload, topology, constraints)) {
    ++result.enumerated;
    auto reject = [&](std::string reason) {
      ++result.infeasible;
      result.rejected.push_back({config, std::move(reason)});
    };
    if (config.global_batch() != workload.global_batch ||
        config.local_batch < 1) {
      reject("global batch " + std::to_string(workload.global_batch) +
             " does not split over " + std::to_string(config.dp_shard) +
             " replicas x " + std::to_string(config.grad_accum) +
             " accumulation steps");
      continue;
    }
    const std::vector<Violation> violations =
        Validate(config, topology, workload);
    if (HasErrors(violations)) {
      reject(violations.front().message);
      continue;
    }
    const MemoryBreakdown memory = MemoryPerGpu(workload, config);
    if (memory.total() > memory_cap) {
      reject("memory per GPU exceeds budget");
      continue;
    }
    SimulationResult sim =
        SimulateStep(workload, config, topology, params, scenario.knobs);
    PlanEntry entry;
    entry.config = config;
    entry.metrics = ComputeMetrics(sim.breakdown, workload, config, topology);
    entry.breakdown = std::move(sim.breakdown);
    result.ranked.push_back(std::move(entry));
  }
  std::sort(result.ranked.begin(), result.ranked.end(),
            [&](const PlanEntry& a, const PlanEntry& b) {
              return RanksAhead(a, b, constraints.objective);
            });
  return result;
}

std::string_view SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kWorld:
      return "world";
    case SweepAxis::kStrong:
      return "strong";
    case SweepAxis::kBatch:
      return "batch";
    case SweepAxis::kModel:
      return "model";
    case SweepAxis::kSeqLen:
      return "seqlen";
    case SweepAxis::kHardware:
      return "hw";
  }
  return "world";
}

std::optional<SweepAxis> ParseSweepAxis(std::string_view name) {
  for (SweepAxis axis : {SweepAxis::kWorld, SweepAxis::kStrong,
                         SweepAxis::kBatch, SweepAxis::kModel,
                         SweepAxis::kSeqLen, SweepAxis::kHardware}) {
    if (SweepAxisName(axis) == name) return axis;
  }
  return std::nullopt;
}

namespace {

SweepPoint FromPlanEntry(const PlanEntry& entry, int num_nodes) {
  SweepPoint p;
  p.num_nodes = num_nodes;
  p.config = entry.config;
  p.breakdown = entry.breakdown;
  p.metrics = entry.metrics;
  return p;
}

std::optional<SweepPoint> SimulatePoint(const Scenario& scenario,
                                        const ParallelismConfig& config,
                                        std::string* notice) {
  const ClusterTopology topology = scenario.topology();
  const std::vector<Violation> violations =
      Validate(config, topology, scenario.workload);
  if (HasErrors(violations)) {
    *notice = violations.front().message;
    return std::nullopt;
  }
  SimulationResult sim =
      SimulateStep(scenario.workload, config, topology,
                   CostParamsFor(topology, scenario.cost_overrides),
                   scenario.knobs);
  SweepPoint p;
  p.num_nodes = scenario.num_nodes;
  p.config = config;
  p.metrics =
      ComputeMetrics(sim.breakdown, scenario.workload, config, topology);
  p.breakdown = std::move(sim.breakdown);
  p.feasible = sim.feasible;
  return p;
}

std::int64_t ParseInt(const std::string& value, const char* what) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || *end != '\0' || v < 1) {
    throw ConfigError(std::string("invalid ") + what + " value '" + value +
                      "'");
  }
  return v;
}

// Applies one axis value to the scenario; returns the numeric axis value.
double ApplyAxis(Scenario& s, SweepAxis axis, const std::string& value) {
  switch (axis) {
    case SweepAxis::kWorld:
    case SweepAxis::kStrong:
      s.num_nodes = static_cast<int>(ParseInt(value, "node count"));
      return static_cast<double>(s.num_nodes) * s.node.gpus_per_node;
    case SweepAxis::kBatch:
      s.workload.global_batch = ParseInt(value, "global batch");
      return static_cast<double>(s.workload.global_batch);
    case SweepAxis::kModel: {
      const std::optional<TransformerArch> arch = ModelPreset(value);
      if (!arch) throw ConfigError("unknown model preset '" + value + "'");
      s.workload.arch = *arch;
      s.workload.arch.max_seq_len =
          std::max(s.workload.arch.max_seq_len, s.workload.seq_len);
      return static_cast<double>(ParamCount(*arch));
    }
    case SweepAxis::kSeqLen:
      s.workload.seq_len = ParseInt(value, "seq_len");
      s.workload.arch.max_seq_len =
          std::max(s.workload.arch.max_seq_len, s.workload.seq_len);
      return static_cast<double>(s.workload.seq_len);
    case SweepAxis::kHardware: {
      const std::optional<Generation> gen = ParseGeneration(value);
      if (!gen) throw ConfigError("unknown hardware preset '" + value + "'");
      const int gpn = s.node.gpus_per_node;
      s.node = Preset(*gen);
      s.node.gpus_per_node = gpn;
      return s.node.gpu.peak_flops;
    }
  }
  return 0.0;
}

}  // namespace

SweepSeries SweepWeak(const Scenario& scenario, const std::vector<int>& nodes,
                      std::int64_t local_batch) {
  std::vector<std::string> values;
  for (int n : nodes) values.push_back(std::to_string(n));
  Scenario s = scenario;
  s.parallelism = ParallelismConfig{};
  s.parallelism.local_batch = local_batch;
  s.parallelism.sharding = scenario.parallelism.sharding;
  return SweepAlong(s, SweepAxis::kWorld, values, false, PlanConstraints{});
}

SweepSeries SweepStrong(const Scenario& scenario, const std::vector<int>& nodes,
                        const PlanConstraints& constraints) {
  std::vector<std::string> values;
  for (int n : nodes) values.push_back(std::to_string(n));
  return SweepAlong(scenario, SweepAxis::kStrong, values, true, constraints);
}

SweepSeries SweepAlong(const Scenario& scenario, SweepAxis axis,
                       const std::vector<std::string>& values, bool replan,
                       const PlanConstraints& constraints) {
  SweepSeries series;
  series.axis = axis;
  for (const std::string& value : values) {
    Scenario s = scenario;
    const double axis_value = ApplyAxis(s, axis, value);
    if (!series.points.empty() &&
        !(axis_value > series.points.back().axis_value)) {
      throw ConfigError("sweep values must be strictly increasing along '" +
                        std::string(SweepAxisName(axis)) + "'");
    }
    std::string notice;
    std::optional<SweepPoint> point;
    if (axis == SweepAxis::kWorld) {
      // Pure FSDP with the scenario's per-device batch.
      ParallelismConfig c = scenario.parallelism;
      c.dp_shard = s.num_nodes * s.node.gpus_per_node;
      c.tp = 1;
      c.pp = 1;
      c.num_microbatches = 1;
      s.workload.global_batch = c.global_batch();
      point = SimulatePoint(s, c, &notice);
      ++series.simulated;
    } else if (replan || axis == SweepAxis::kStrong) {
      const PlanResult plan = Plan(s, constraints);
      series.simulated += plan.enumerated - plan.infeasible;
      if (plan.feasible()) {
        point = FromPlanEntry(plan.ranked.front(), s.num_nodes);
      } else {
        notice = "no feasible configuration";
      }
    } else {
      ParallelismConfig c = scenario.parallelism;
      if (axis == SweepAxis::kBatch) {
        const std::int64_t per_replica =
            static_cast<std::int64_t>(c.dp_shard) * c.grad_accum;
        if (s.workload.global_batch % per_replica != 0) {
          notice = "global batch does not split over the data-parallel group";
        } else {
          c.local_batch = s.workload.global_batch / per_replica;
        }
      }
      if (notice.empty()) {
        point = SimulatePoint(s, c, &notice);
        ++series.simulated;
      }
    }
    if (!point) {
      series.notices.push_back(std::string(SweepAxisName(axis)) + "=" + value +
                               " skipped: " + notice);
      continue;
    }
    point->axis_value = axis_value;
    point->label = value;
    series.points.push_back(std::move(*point));
  }
  if (axis == SweepAxis::kWorld && !series.points.empty()) {
    const SweepPoint& base = series.points.front();
    for (SweepPoint& p : series.points) {
      p.wps_ideal = base.metrics.wps_global * p.axis_value / base.axis_value;
    }
  }
  return series;
}

int EstimateSweepCost(const Scenario& scenario, SweepAxis axis,
                      const std::vector<std::string>& values, bool replan,
                      const PlanConstraints& constraints) {
  if (axis == SweepAxis::kWorld || (!replan && axis != SweepAxis::kStrong)) {
    return static_cast<int>(values.size());
  }
  int total = 0;
  for (const std::string& value : values) {
    Scenario s = scenario;
    ApplyAxis(s, axis, value);
    total += static_cast<int>(
        EnumerateConfigs(s.workload, s.topology(), constraints).size());
  }
  return total;
}

}  // namespace shardsim
