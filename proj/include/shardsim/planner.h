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

#ifndef SHARDSIM_PLANNER_H_
#define SHARDSIM_PLANNER_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shardsim/engine.h"
#include "shardsim/metrics.h"
#include "shardsim/parallelism.h"
#include "shardsim/scenario.h"

namespace shardsim {

enum class Objective { kThroughput, kEnergy };

std::string_view ObjectiveName(Objective objective);
std::optional<Objective> ParseObjective(std::string_view name);

struct PlanConstraints {
  int max_tp = 16;
  int max_pp = 16;
  // Per-GPU memory budget in bytes; unset means the device capacity.
  std::optional<double> memory_cap;
  std::vector<int> grad_accum = {1};
  ShardingMode sharding = ShardingMode::kZero2;
  Objective objective = Objective::kThroughput;
};

struct PlanEntry {
  ParallelismConfig config;
  StepBreakdown breakdown;
  MetricsReport metrics;
};

struct RejectedConfig {
  ParallelismConfig config;
  std::string reason;
};

struct PlanResult {
  std::vector<PlanEntry> ranked;
  std::vector<RejectedConfig> rejected;
  int enumerated = 0;
  int infeasible = 0;
  PlanConstraints constraints;

  bool feasible() const { return !ranked.empty(); }
};

inline constexpr int kDegreeLadder[] = {1, 2, 4, 8, 16};

// Pipeline microbatch counts tried for a pipeline depth.
std::vector<int> MicrobatchLadder(int pp);

// Candidate configs the planner would simulate, before batch and memory
// checks.
std::vector<ParallelismConfig> EnumerateConfigs(
    const TrainingWorkload& workload, const ClusterTopology& topology,
    const PlanConstraints& constraints);

// True when `a` ranks strictly ahead of `b`.
bool RanksAhead(const PlanEntry& a, const PlanEntry& b, Objective objective);

// Uses scenario hardware, workload, knobs, and cost overrides; its
// parallelism block is ignored.
PlanResult Plan(const Scenario& scenario, const PlanConstraints& constraints);

enum class SweepAxis { kWorld, kStrong, kBatch, kModel, kSeqLen, kHardware };

std::string_view SweepAxisName(SweepAxis axis);
std::optional<SweepAxis> ParseSweepAxis(std::string_view name);

struct SweepPoint {
  double axis_value = 0.0;
  std::string label;
  int num_nodes = 1;
  ParallelismConfig config;
  StepBreakdown breakdown;
  MetricsReport metrics;
  bool feasible = true;
  std::optional<double> wps_ideal;
};

struct SweepSeries {
  SweepAxis axis = SweepAxis::kWorld;
  std::vector<SweepPoint> points;
  std::vector<std::string> notices;
  int simulated = 0;
};

// Pure FSDP at a fixed per-device batch; the first point anchors the ideal
// linear-scaling throughput.
SweepSeries SweepWeak(const Scenario& scenario, const std::vector<int>& nodes,
                      std::int64_t local_batch);

// Fixed global batch over a node ladder, best plan per point.
SweepSeries SweepStrong(const Scenario& scenario, const std::vector<int>& nodes,
                        const PlanConstraints& constraints);

// Varies one of batch, model, seq_len, or hardware with everything else
// held. With replan, each point takes the best plan; otherwise the
// scenario's parallelism is reused (scaled to the point's global batch for
// the batch axis).
SweepSeries SweepAlong(const Scenario& scenario, SweepAxis axis,
                       const std::vector<std::string>& values, bool replan,
                       const PlanConstraints& constraints);

// Number of configs a sweep would simulate.
int EstimateSweepCost(const Scenario& scenario, SweepAxis axis,
                      const std::vector<std::string>& values, bool replan,
                      const PlanConstraints& constraints);

}  // namespace shardsim

#endif  // SHARDSIM_PLANNER_H_
