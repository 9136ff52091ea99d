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

#ifndef SHARDSIM_WORKLOAD_H_
#define SHARDSIM_WORKLOAD_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shardsim {

struct ParallelismConfig;

// Decoder-only transformer with a gated MLP and tied input/output embedding.
struct TransformerArch {
  std::int64_t num_layers = 1;
  std::int64_t hidden_dim = 1;
  std::int64_t num_heads = 1;
  std::int64_t ffn_dim = 1;
  std::int64_t vocab_size = 1;
  std::int64_t max_seq_len = 1;
};

std::vector<std::string> CheckArch(const TransformerArch& arch);

// Public Llama-2 shapes: "1b", "7b", "13b", "70b".
std::optional<TransformerArch> ModelPreset(std::string_view name);
std::vector<std::string> ModelPresetNames();

enum class Optimizer { kAdamW };

struct TrainingWorkload {
  TransformerArch arch;
  std::int64_t global_batch = 1;  // sequences per optimizer step
  std::int64_t seq_len = 1;
  int param_bytes = 2;
  Optimizer optimizer = Optimizer::kAdamW;
};

std::vector<std::string> CheckWorkload(const TrainingWorkload& workload);

// fp32 master weights plus two fp32 moments.
inline constexpr double kAdamStateBytesPerParam = 12.0;
// Activation bytes kept per token per layer, in units of hidden_dim.
inline constexpr double kActivationBytesPerTokenPerHidden = 34.0;

std::int64_t LayerParamCount(const TransformerArch& arch);
// Embedding (shared with the output head) and the final norm.
std::int64_t NonLayerParamCount(const TransformerArch& arch);
std::int64_t ParamCount(const TransformerArch& arch);

// Forward+backward FLOPs of dense matmuls for one transformer layer over
// `sequences` sequences, as seen by one of `tp_degree` tensor-parallel ranks.
// Attention score and value products count the causal half.
std::uint64_t LayerStepFlops(const TrainingWorkload& workload,
                             std::int64_t sequences, int tp_degree);
// Output-head FLOPs on the same terms.
std::uint64_t HeadStepFlops(const TrainingWorkload& workload,
                            std::int64_t sequences, int tp_degree);

// Whole-model FLOPs per tensor-parallel rank per microstep. Throws
// ConfigError when tp_degree does not divide heads and ffn_dim.
std::uint64_t StepFlops(const TrainingWorkload& workload,
                        std::int64_t local_batch, int tp_degree);

// FLOPs of pipeline stage `stage` of `pp_degree`; the last stage owns the
// output head.
std::uint64_t StageStepFlops(const TrainingWorkload& workload,
                             std::int64_t local_batch, int tp_degree,
                             int pp_degree, int stage);

struct MemoryBreakdown {
  double params = 0.0;
  double grads = 0.0;
  double optimizer = 0.0;
  double activations = 0.0;
  double total() const { return params + grads + optimizer + activations; }
};

// Per-GPU resident bytes. Parameters stay whole within a model-parallel
// shard unless the config shards them at rest (ZeRO-3).
MemoryBreakdown MemoryPerGpu(const TrainingWorkload& workload,
                             const ParallelismConfig& config);

}  // namespace shardsim

#endif  // SHARDSIM_WORKLOAD_H_
