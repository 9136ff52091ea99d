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

#ifndef SHARDSIM_SCALING_LAW_H_
#define SHARDSIM_SCALING_LAW_H_

#include "shardsim/collectives.h"
#include "shardsim/engine.h"
#include "shardsim/hardware.h"
#include "shardsim/metrics.h"
#include "shardsim/parallelism.h"
#include "shardsim/workload.h"

namespace shardsim {

struct ShardScaling {
  double p = 1.0;
  double p_prime = 1.0;
  double s_b = 1.0;
  double s_c = 1.0;
  double ell = 0.0;
  double c = 1.0;
};

// c = ((p'/p) / s_b) * ((p'/p) / s_c - ell). Throws ParameterError on
// non-positive factors or an ell outside [0, (p'/p) / s_c]. s_c may be
// +infinity.
double ShardCostFactor(double p, double p_prime, double s_b, double s_c,
                       double ell);

// Factors estimated from one simulation of each config.
//   s_b = (p'/p) * C'/C
//   s_c = (p'/p) * (X' + min(H, H')) / (X + H)
//   ell = max(0, H - H') / (X' + min(H, H'))
// where C is compute time, X exposed communication plus bubble, and H the
// overlapped communication. Overlapped time that p' no longer needs was
// never on the critical path, so ell takes it back out.
ShardScaling EstimateScaleFactors(const TrainingWorkload& workload,
                                  const ClusterTopology& topology,
                                  const ParallelismConfig& config_p,
                                  const ParallelismConfig& config_p_prime,
                                  const CollectiveCostParams& cost_params,
                                  const Knobs& knobs);

// Same, from already simulated breakdowns.
ShardScaling ScaleFactorsFromBreakdowns(double p, double p_prime,
                                        const StepBreakdown& from,
                                        const StepBreakdown& to);

struct Decision {
  ShardScaling scaling;
  bool improves = false;  // c > 1
  double simulated_throughput_ratio = 1.0;  // wps(p') / wps(p)
  bool agrees = true;
  SimulationResult from;
  SimulationResult to;
  MetricsReport from_metrics;
  MetricsReport to_metrics;
};

// Throws ConfigError when the two configs disagree on global batch.
Decision Decide(const TrainingWorkload& workload,
                const ClusterTopology& topology,
                const ParallelismConfig& config_p,
                const ParallelismConfig& config_p_prime,
                const CollectiveCostParams& cost_params, const Knobs& knobs);

}  // namespace shardsim

#endif  // SHARDSIM_SCALING_LAW_H_
