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


#include "shardsim/parallelism.h"

#include <cstdio>
#include <string>

#include "shardsim/errors.h"
#include "shardsim/workload.h"

namespace shardsim {

std::string_view ShardingModeName(ShardingMode mode) {
  return mode == ShardingMode::kZero3 ? "zero3" : "zero2";
}

std::optional<ShardingMode> ParseShardingMode(std::string_view name) {
  if (name == "zero2") return ShardingMode::kZero2;
  if (name == "zero3") return ShardingMode::kZero3;
  return std::nullopt;
}

namespace {

std::string FormatBytes(double bytes) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f GiB", bytes / kGiB);
  return buf;
}

}  // namespace

std::vector<Violation> Validate(const ParallelismConfig& config,
                                const ClusterTopology& topology,
                                const TrainingWorkload& workload) {
  std::vector<Violation> out;
  auto error = [&out](std::string path, std::string message) {
    out.push_back({std::move(path), std::move(message),
                   Violation::Severity::kError});
  };
  for (const std::string& e : CheckWorkload(workload)) error("/model", e);

  bool degrees_ok = true;
  if (config.dp_shard < 1) {
    error("/parallelism/dp_shard", "dp_shard must be >= 1");
    degrees_ok = false;
  }
  if (config.tp < 1) {
    error("/parallelism/tp", "tp must be >= 1");
    degrees_ok = false;
  }
  if (config.pp < 1) {
    error("/parallelism/pp", "pp must be >= 1");
    degrees_ok = false;
  }
  if (config.local_batch < 1) {
    error("/parallelism/local_batch", "local_batch must be >= 1");
    degrees_ok = false;
  }
  if (config.num_microbatches < 1) {
    error("/parallelism/microbatches", "microbatches must be >= 1");
    degrees_ok = false;
  }
  if (config.grad_accum < 1) {
    error("/parallelism/grad_accum", "grad_accum must be >= 1");
    degrees_ok = false;
  }
  if (!degrees_ok) return out;

  const long long product =
      static_cast<long long>(config.dp_shard) * config.tp * config.pp;
  if (product != topology.world_size()) {
    error("/parallelism",
          "product mismatch: dp_shard x tp x pp = " + std::to_string(product) +
              " but world size is " + std::to_string(topology.world_size()));
  }
  if (config.global_batch() != workload.global_batch) {
    error("/workload/global_batch",
          "global batch mismatch: dp_shard x local_batch x grad_accum = " +
              std::to_string(config.global_batch()) + " but global_batch is " +
              std::to_string(workload.global_batch));
  }
  if (config.pp > 1 && config.num_microbatches < config.pp) {
    error("/parallelism/microbatches",
          "microbatches (" + std::to_string(config.num_microbatches) +
              ") must be >= pp (" + std::to_string(config.pp) + ")");
  }
  const TransformerArch& arch = workload.arch;
  if (arch.num_heads >= 1 && arch.num_heads % config.tp != 0) {
    error("/parallelism/tp", "tp (" + std::to_string(config.tp) +
                                 ") must divide num_heads (" +
                                 std::to_string(arch.num_heads) + ")");
  }
  if (arch.ffn_dim >= 1 && arch.ffn_dim % config.tp != 0) {
    error("/parallelism/tp", "tp (" + std::to_string(config.tp) +
                                 ") must divide ffn_dim (" +
                                 std::to_string(arch.ffn_dim) + ")");
  }
  if (arch.num_layers >= 1 && arch.num_layers % config.pp != 0) {
    error("/parallelism/pp", "pp (" + std::to_string(config.pp) +
                                 ") must divide num_layers (" +
                                 std::to_string(arch.num_layers) + ")");
  }
  if (HasErrors(out)) return out;

  const MemoryBreakdown memory = MemoryPerGpu(workload, config);
  if (memory.total() > topology.gpu().memory_capacity) {
    out.push_back({"/parallelism",
                   "memory per GPU " + FormatBytes(memory.total()) +
                       " exceeds capacity " +
                       FormatBytes(topology.gpu().memory_capacity),
                   Violation::Severity::kInfeasible});
  }
  return out;
}

bool HasErrors(const std::vector<Violation>& violations) {
  for (const Violation& v : violations) {
    if (v.severity == Violation::Severity::kError) return true;
  }
  return false;
}

Span DataParallelSpan(const ClusterTopology& topology,
                      const ParallelismConfig& config) {
  return GroupSpan(topology, config.dp_shard, config.tp * config.pp);
}

Span TensorParallelSpan(const ClusterTopology& topology,
                        const ParallelismConfig& config) {
  return GroupSpan(topology, config.tp, 1);
}

Span PipelineSpan(const ClusterTopology& topology,
                  const ParallelismConfig& config) {
  return GroupSpan(topology, config.pp, config.tp);
}

std::vector<double> FsdpUnitBytes(const TrainingWorkload& workload,
                                  const ParallelismConfig& config) {
  const TransformerArch& arch = workload.arch;
  const int layers = static_cast<int>(arch.num_layers / config.pp);
  const double bytes = workload.param_bytes;
  std::vector<double> units(layers, static_cast<double>(LayerParamCount(arch)) *
                                        bytes / config.tp);
  if (!units.empty()) {
    units.front() += static_cast<double>(NonLayerParamCount(arch)) * bytes /
                     (static_cast<double>(config.tp) * config.pp);
  }
  return units;
}

std::vector<LayerOp> FsdpOps(const TrainingWorkload& workload,
                             const ParallelismConfig& config,
                             const ClusterTopology& topology) {
  std::vector<LayerOp> ops;
  if (config.dp_shard <= 1) return ops;
  const Span span = DataParallelSpan(topology, config);
  const std::vector<double> units = FsdpUnitBytes(workload, config);
  const int layers = static_cast<int>(units.size());
  for (int i = 0; i < layers; ++i) {
    ops.push_back({i, Pass::kForward,
                   {CollectiveKind::kAllGather, units[i], config.dp_shard,
                    span, true}});
  }
  for (int i = layers - 1; i >= 0; --i) {
    if (config.sharding == ShardingMode::kZero3) {
      ops.push_back({i, Pass::kBackward,
                     {CollectiveKind::kAllGather, units[i], config.dp_shard,
                      span, true}});
    }
    ops.push_back({i, Pass::kBackward,
                   {CollectiveKind::kReduceScatter, units[i], config.dp_shard,
                    span, false}});
  }
  return ops;
}

double BoundaryActivationBytes(const TrainingWorkload& workload,
                               double sequences) {
  return sequences * static_cast<double>(workload.seq_len) *
         static_cast<double>(workload.arch.hidden_dim) * workload.param_bytes;
}

std::vector<LayerOp> TpOps(const TrainingWorkload& workload,
                           const ParallelismConfig& config,
                           const ClusterTopology& topology) {
  std::vector<LayerOp> ops;
  if (config.tp <= 1) return ops;
  const Span span = TensorParallelSpan(topology, config);
  const int layers = static_cast<int>(workload.arch.num_layers / config.pp);
  const int m = config.pipeline_microbatches();
  const CommOp op{CollectiveKind::kAllReduce,
                  BoundaryActivationBytes(workload, config.microbatch_size()),
                  config.tp, span, true};
  for (int i = 0; i < layers; ++i) {
    for (int k = 0; k < 2 * m; ++k) ops.push_back({i, Pass::kForward, op});
  }
  for (int i = layers - 1; i >= 0; --i) {
    for (int k = 0; k < 2 * m; ++k) ops.push_back({i, Pass::kBackward, op});
  }
  return ops;
}

double BubbleFraction(int pp, int num_microbatches) {
  if (pp < 1) throw ConfigError("pp must be >= 1");
  if (pp == 1) return 0.0;
  if (num_microbatches < pp) {
    throw ConfigError("microbatches must be >= pp for pipelined execution");
  }
  return static_cast<double>(pp - 1) / (num_microbatches + pp - 1);
}

PipelinePlan PipelineSchedulePlan(const TrainingWorkload& workload,
                                  const ParallelismConfig& config,
                                  const ClusterTopology& topology) {
  PipelinePlan plan;
  plan.bubble_fraction = BubbleFraction(config.pp, config.num_microbatches);
  if (config.pp == 1) return plan;
  const CommOp send{CollectiveKind::kPointToPoint,
                    BoundaryActivationBytes(workload, config.microbatch_size()),
                    2, PipelineSpan(topology, config), false};
  const int sends = 2 * config.num_microbatches * (config.pp - 1);
  plan.ops.assign(sends, send);
  return plan;
}

}  // namespace shardsim
