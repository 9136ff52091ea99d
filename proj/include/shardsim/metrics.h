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

#ifndef SHARDSIM_METRICS_H_
#define SHARDSIM_METRICS_H_

#include "shardsim/engine.h"
#include "shardsim/hardware.h"
#include "shardsim/parallelism.h"
#include "shardsim/workload.h"

namespace shardsim {

inline constexpr double kDefaultPowerKappa = 0.158;
inline constexpr double kDefaultPowerMfuRef = 0.40;

struct MetricsReport {
  double wps_global = 0.0;   // tokens/s
  double wps_per_gpu = 0.0;  // tokens/s per device
  double mfu = 0.0;
  double observed_flops_per_gpu = 0.0;  // FLOP/s
  double power_per_gpu = 0.0;           // W
  double tokens_per_watt = 0.0;         // tokens/s per W
  double memory_per_gpu_bytes = 0.0;
  double exposed_comm_fraction = 0.0;
};

// Linear in MFU around the reference point, clamped to [idle, peak].
double PowerDraw(double mfu, const GpuSpec& gpu,
                 double kappa = kDefaultPowerKappa,
                 double mfu_ref = kDefaultPowerMfuRef);

// Model FLOPs of one optimizer step summed over all devices.
double TotalStepFlops(const TrainingWorkload& workload);

MetricsReport ComputeMetrics(const StepBreakdown& breakdown,
                             const TrainingWorkload& workload,
                             const ParallelismConfig& config,
                             const ClusterTopology& topology);

}  // namespace shardsim

#endif  // SHARDSIM_METRICS_H_
