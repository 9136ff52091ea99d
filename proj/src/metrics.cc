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


#include "shardsim/metrics.h"

#include <algorithm>

#include "shardsim/errors.h"

namespace shardsim {

double PowerDraw(double mfu, const GpuSpec& gpu, double kappa, double mfu_ref) {
  if (!(mfu >= 0.0 && mfu <= 1.0)) throw ParameterError("mfu must be in [0, 1]");
  if (!(mfu_ref > 0.0)) throw ParameterError("mfu_ref must be positive");
  if (!(kappa >= 0.0)) throw ParameterError("kappa must be >= 0");
  const double p = gpu.power_peak * (1.0 - kappa * (1.0 - mfu / mfu_ref));
  return std::clamp(p, gpu.power_idle, gpu.power_peak);
}

double TotalStepFlops(const TrainingWorkload& workload) {
  return static_cast<double>(StepFlops(workload, workload.global_batch, 1));
}

MetricsReport ComputeMetrics(const StepBreakdown& breakdown,
                             const TrainingWorkload& workload,
                             const ParallelismConfig& config,
                             const ClusterTopology& topology) {
  if (!(breakdown.step_time > 0.0)) {
    throw ParameterError("step_time must be positive");
  }
  const double world = topology.world_size();
  const double tokens = static_cast<double>(workload.global_batch) *
                        static_cast<double>(workload.seq_len);
  MetricsReport m;
  m.wps_global = tokens / breakdown.step_time;
  m.wps_per_gpu = m.wps_global / world;
  m.observed_flops_per_gpu =
      TotalStepFlops(workload) / world / breakdown.step_time;
  m.mfu = std::min(1.0, m.observed_flops_per_gpu / topology.gpu().peak_flops);
  m.power_per_gpu = PowerDraw(m.mfu, topology.gpu());
  m.tokens_per_watt = m.wps_global / (m.power_per_gpu * world);
  m.memory_per_gpu_bytes = MemoryPerGpu(workload, config).total();
  m.exposed_comm_fraction = breakdown.comm_exposed / breakdown.step_time;
  return m;
}

}  // namespace shardsim
