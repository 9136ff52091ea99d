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

#ifndef SHARDSIM_ENGINE_H_
#define SHARDSIM_ENGINE_H_

#include <string>
#include <vector>

#include "shardsim/collectives.h"
#include "shardsim/hardware.h"
#include "shardsim/parallelism.h"
#include "shardsim/workload.h"

namespace shardsim {

struct Knobs {
  // Layers an FSDP AllGather may run ahead of the compute that needs it.
  int prefetch_depth = 1;
  // Fraction of peak FLOP/s that compute kernels reach.
  double compute_efficiency = 0.65;
  // Compute time grows as batch^s_b_exponent below s_b_saturation
  // sequences per microbatch, and linearly above it.
  double s_b_exponent = 1.0;
  double s_b_saturation = 16.0;
  // Fraction of each tensor-parallel AllReduce hidden behind compute.
  double tp_overlap = 0.0;

  bool operator==(const Knobs&) const = default;
};

std::vector<std::string> CheckKnobs(const Knobs& knobs);

// Multiplier applied to linear compute time for a microbatch of `sequences`.
double BatchEfficiencyScale(double sequences, const Knobs& knobs);

// Compute seconds for `flops` executed on microbatches of `sequences`.
double FlopsTime(double flops, double sequences, const GpuSpec& gpu,
                 const Knobs& knobs);

// Per-device compute time of one optimizer step on the slowest stage.
double ComputeTime(const TrainingWorkload& workload,
                   const ParallelismConfig& config, const GpuSpec& gpu,
                   double efficiency);
double ComputeTime(const TrainingWorkload& workload,
                   const ParallelismConfig& config, const GpuSpec& gpu,
                   const Knobs& knobs);

struct PhaseBreakdown {
  std::string label;
  double compute = 0.0;
  double comm = 0.0;
  double exposed = 0.0;
};

struct StepBreakdown {
  double compute_time = 0.0;
  double comm_total = 0.0;
  double comm_exposed = 0.0;
  double bubble_time = 0.0;
  double step_time = 0.0;
  std::vector<PhaseBreakdown> per_phase;

  double comm_overlapped() const { return comm_total - comm_exposed; }
};

struct SimulationResult {
  StepBreakdown breakdown;
  MemoryBreakdown memory;
  bool feasible = true;
  std::string infeasibility;
  // Pipeline stage whose step time is reported.
  int critical_stage = 0;
};

// Throws ConfigError on structural violations of the config or knobs.
// Exceeding device memory is reported through `feasible`.
SimulationResult SimulateStep(const TrainingWorkload& workload,
                              const ParallelismConfig& config,
                              const ClusterTopology& topology,
                              const CollectiveCostParams& cost_params,
                              const Knobs& knobs);

// Makespan of a compute stream fed by a single communication stream.
// compute[j] runs after compute[j-1] and after every comm item `needed_by`
// j. A comm item starts no earlier than the end of compute[gate] (gate < 0
// means at time zero) and runs in list order. Exposed as the primitive the
// engine schedules with.
struct CommItem {
  int gate = -1;
  int needed_by = -1;  // -1: nothing waits on it
  double duration = 0.0;
};

struct StreamSchedule {
  std::vector<double> compute_start;
  std::vector<double> compute_end;
  std::vector<double> comm_start;
  std::vector<double> comm_end;
  double makespan = 0.0;
};

StreamSchedule ScheduleStreams(const std::vector<double>& compute,
                               const std::vector<CommItem>& comm);

}  // namespace shardsim

#endif  // SHARDSIM_ENGINE_H_
