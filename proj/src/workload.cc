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

#include "shardsim/workload.h"

#include <string>

#include "shardsim/errors.h"
#include "shardsim/parallelism.h"

namespace shardsim {

std::vector<std::string> CheckArch(const TransformerArch& arch) {
  std::vector<std::string> errors;
  if (arch.num_layers < 1) errors.push_back("num_layers must be >= 1");
  if (arch.hidden_dim < 1) errors.push_back("hidden_dim must be >= 1");
  if (arch.num_heads < 1) errors.push_back("num_heads must be >= 1");
  if (arch.ffn_dim < 1) errors.push_back("ffn_dim must be >= 1");
  if (arch.vocab_size < 1) errors.push_back("vocab_size must be >= 1");
  if (arch.max_seq_len < 1) errors.push_back("max_seq_len must be >= 1");
  if (arch.num_heads >= 1 && arch.hidden_dim % arch.num_heads != 0) {
    errors.push_back("hidden_dim must be divisible by num_heads");
  }
  return errors;
}

std::optional<TransformerArch> ModelPreset(std::string_view name) {
  // {layers, hidden, heads, ffn, vocab, max_seq_len}
  if (name == "1b") return TransformerArch{22, 2048, 32, 5632, 32000, 4096};
  if (name == "7b") return TransformerArch{32, 4096, 32, 11008, 32000, 4096};
  if (name == "13b") return TransformerArch{40, 5120, 40, 13824, 32000, 4096};
  if (name == "70b") return TransformerArch{80, 8192, 64, 28672, 32000, 4096};
  return std::nullopt;
}

std::vector<std::string> ModelPresetNames() { return {"1b", "7b", "13b", "70b"}; }

std::vector<std::string> CheckWorkload(const TrainingWorkload& workload) {
  std::vector<std::string> errors = CheckArch(workload.arch);
  if (workload.global_batch < 1) errors.push_back("global_batch must be >= 1");
  if (workload.seq_len < 1) errors.push_back("seq_len must be >= 1");
  if (workload.seq_len > workload.arch.max_seq_len) {
    errors.push_back("seq_len exceeds max_seq_len");
  }
  if (workload.param_bytes != 2 && workload.param_bytes != 4) {
    errors.push_back("param_bytes must be 2 or 4");
  }
  return errors;
}

std::int64_t LayerParamCount(const TransformerArch& arch) {
  const std::int64_t h = arch.hidden_dim;
  return 4 * h * h + 3 * h * arch.ffn_dim + 2 * h;
}

std::int64_t NonLayerParamCount(const TransformerArch& arch) {
  return arch.vocab_size * arch.hidden_dim + arch.hidden_dim;
}

std::int64_t ParamCount(const TransformerArch& arch) {
  return arch.num_layers * LayerParamCount(arch) + NonLayerParamCount(arch);
}

namespace {

void CheckTensorParallel(const TransformerArch& arch, int tp_degree) {
  if (tp_degree < 1 || arch.num_heads % tp_degree != 0 ||
      arch.ffn_dim % tp_degree != 0) {
    throw ConfigError("tensor-parallel degree " + std::to_string(tp_degree) +
                      " must divide num_heads and ffn_dim");
  }
}

}  // namespace

std::uint64_t LayerStepFlops(const TrainingWorkload& workload,
                             std::int64_t sequences, int tp_degree) {
  const TransformerArch& arch = workload.arch;
  CheckTensorParallel(arch, tp_degree);
  const std::uint64_t s = workload.seq_len;
  const std::uint64_t h = arch.hidden_dim;
  const std::uint64_t h_shard = h / tp_degree;
  const std::uint64_t f_shard = arch.ffn_dim / tp_degree;
  // QKV and output projections, gated MLP, causal QK^T and AV.
  const std::uint64_t forward =
      8 * s * h * h_shard + 6 * s * h * f_shard + 2 * s * s * h_shard;
  return 3 * forward * static_cast<std::uint64_t>(sequences);
}

std::uint64_t HeadStepFlops(const TrainingWorkload& workload,
                            std::int64_t sequences, int tp_degree) {
  CheckTensorParallel(workload.arch, tp_degree);
  const std::uint64_t s = workload.seq_len;
  const std::uint64_t h_shard = workload.arch.hidden_dim / tp_degree;
  const std::uint64_t forward = 2 * s * h_shard * workload.arch.vocab_size;
  return 3 * forward * static_cast<std::uint64_t>(sequences);
}

std::uint64_t StepFlops(const TrainingWorkload& workload,
                        std::int64_t local_batch, int tp_degree) {
  return workload.arch.num_layers *
             LayerStepFlops(workload, local_batch, tp_degree) +
         HeadStepFlops(workload, local_batch, tp_degree);
}

std::uint64_t StageStepFlops(const TrainingWorkload& workload,
                             std::int64_t local_batch, int tp_degree,
                             int pp_degree, int stage) {
  if (pp_degree < 1 || workload.arch.num_layers % pp_degree != 0) {
    throw ConfigError("pipeline degree " + std::to_string(pp_degree) +
                      " must divide num_layers");
  }
  const std::uint64_t layers = workload.arch.num_layers / pp_degree;
  std::uint64_t flops = layers * LayerStepFlops(workload, local_batch, tp_degree);
  if (stage == pp_degree - 1) {
    flops += HeadStepFlops(workload, local_batch, tp_degree);
  }
  return flops;
}

MemoryBreakdown MemoryPerGpu(const TrainingWorkload& workload,
                             const ParallelismConfig& config) {
  const double model_parallel = static_cast<double>(config.tp) * config.pp;
  const double shard_params =
      static_cast<double>(ParamCount(workload.arch)) / model_parallel;
  const double dp = config.dp_shard;
  MemoryBreakdown m;
  m.params = shard_params * workload.param_bytes;
  if (config.sharding == ShardingMode::kZero3) m.params /= dp;
  m.grads = shard_params * workload.param_bytes / dp;
  m.optimizer = shard_params * kAdamStateBytesPerParam / dp;
  const double layers_per_stage =
      static_cast<double>(workload.arch.num_layers) / config.pp;
  m.activations = kActivationBytesPerTokenPerHidden *
                  static_cast<double>(workload.arch.hidden_dim) *
                  layers_per_stage * static_cast<double>(config.local_batch) *
                  static_cast<double>(workload.seq_len) / config.tp;
  return m;
}

}  // namespace shardsim
