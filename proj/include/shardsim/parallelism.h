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

#ifndef SHARDSIM_PARALLELISM_H_
#define SHARDSIM_PARALLELISM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shardsim/collectives.h"
#include "shardsim/hardware.h"

namespace shardsim {

struct TrainingWorkload;

// kZero2 keeps gathered parameters resident through the step (no
// resharding after forward); kZero3 frees them and gathers again for
// backward.
enum class ShardingMode { kZero2, kZero3 };
enum class PipelineSchedule { kGPipe };

std::string_view ShardingModeName(ShardingMode mode);
std::optional<ShardingMode> ParseShardingMode(std::string_view name);

// Ranks are laid out tensor-parallel innermost, then pipeline, then data
// parallel. local_batch is the per-replica batch of one accumulation
// microstep; with pp > 1 it is split into num_microbatches pipeline
// microbatches (which may be fractional sequences).
struct ParallelismConfig {
  int dp_shard = 1;
  int tp = 1;
  int pp = 1;
  std::int64_t local_batch = 1;
  int num_microbatches = 1;
  int grad_accum = 1;
  ShardingMode sharding = ShardingMode::kZero2;
  PipelineSchedule schedule = PipelineSchedule::kGPipe;

  // GPUs per model replica.
  int parallelism_factor() const { return tp * pp; }
  int world_size() const { return dp_shard * tp * pp; }
  std::int64_t global_batch() const {
    return static_cast<std::int64_t>(dp_shard) * local_batch * grad_accum;
  }
  // Sequences per pipeline microbatch.
  double microbatch_size() const {
    return pp > 1 ? static_cast<double>(local_batch) / num_microbatches
                  : static_cast<double>(local_batch);
  }
  int pipeline_microbatches() const { return pp > 1 ? num_microbatches : 1; }

  bool operator==(const ParallelismConfig&) const = default;
};

struct Violation {
  enum class Severity { kError, kInfeasible };
  std::string path;  // JSON pointer into the run config
  std::string message;
  Severity severity = Severity::kError;
};

// Structural violations are kError; exceeding device memory is kInfeasible.
std::vector<Violation> Validate(const ParallelismConfig& config,
                                const ClusterTopology& topology,
                                const TrainingWorkload& workload);
bool HasErrors(const std::vector<Violation>& violations);

enum class Pass { kForward, kBackward };

// A communication op attached to a layer of the local pipeline stage.
struct LayerOp {
  int layer = 0;
  Pass pass = Pass::kForward;
  CommOp op;
};

Span DataParallelSpan(const ClusterTopology& topology,
                      const ParallelismConfig& config);
Span TensorParallelSpan(const ClusterTopology& topology,
                        const ParallelismConfig& config);
Span PipelineSpan(const ClusterTopology& topology,
                  const ParallelismConfig& config);

// Bytes gathered for each local layer of `stage`; the stage's share of the
// embedding and final norm rides on its first layer.
std::vector<double> FsdpUnitBytes(const TrainingWorkload& workload,
                                  const ParallelismConfig& config);

// Per optimizer step: one forward AllGather and one backward ReduceScatter
// per local layer over the data-parallel group (plus a backward AllGather
// per layer under kZero3). Empty when dp_shard == 1.
std::vector<LayerOp> FsdpOps(const TrainingWorkload& workload,
                             const ParallelismConfig& config,
                             const ClusterTopology& topology);

// Per accumulation microstep: two forward and two backward activation
// AllReduces per layer and pipeline microbatch. Empty when tp == 1.
std::vector<LayerOp> TpOps(const TrainingWorkload& workload,
                           const ParallelismConfig& config,
                           const ClusterTopology& topology);

struct PipelinePlan {
  double bubble_fraction = 0.0;
  // Per accumulation microstep, across the whole replica: an activation send
  // and a gradient send per microbatch and stage boundary.
  std::vector<CommOp> ops;
};

// GPipe bubble (pp - 1) / (m + pp - 1). Throws ConfigError when pp > 1 and
// there are fewer microbatches than stages.
double BubbleFraction(int pp, int num_microbatches);
PipelinePlan PipelineSchedulePlan(const TrainingWorkload& workload,
                                  const ParallelismConfig& config,
                                  const ClusterTopology& topology);

// Bytes of one microbatch's activations at a layer boundary.
double BoundaryActivationBytes(const TrainingWorkload& workload,
                               double sequences);

}  // namespace shardsim

#endif  // SHARDSIM_PARALLELISM_H_
