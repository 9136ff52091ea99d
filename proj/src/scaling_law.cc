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


#include "shardsim/scaling_law.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shardsim/errors.h"

namespace shardsim {

double ShardCostFactor(double p, double p_prime, double s_b, double s_c,
                       double ell) {
  if (!(p >= 1.0) || !(p_prime >= 1.0)) {
    throw ParameterError("p and p_prime must be >= 1");
  }
  if (!(s_b > 0.0) || !std::isfinite(s_b)) {
    throw ParameterError("s_b must be positive and finite");
  }
  if (!(s_c > 0.0)) throw ParameterError("s_c must be positive");
  const double r = p_prime / p;
  const double comm_term = r / s_c;
  if (!(ell >= 0.0) ||
      ell > comm_term * (1.0 + 1e-12) + std::numeric_limits<double>::min()) {
    throw ParameterError("ell must lie in [0, (p'/p) / s_c]");
  }
  return (r / s_b) * (comm_term - ell);
}

ShardScaling ScaleFactorsFromBreakdowns(double p, double p_prime,
                                        const StepBreakdown& from,
                                        const StepBreakdown& to) {
  if (!(from.compute_time > 0.0) || !(to.compute_time > 0.0)) {
    throw ParameterError("compute time must be positive");
  }
  ShardScaling s;
  s.p = p;
  s.p_prime = p_prime;
  const double r = p_prime / p;
  s.s_b = r * to.compute_time / from.compute_time;

  const double x = from.comm_exposed + from.bubble_time;
  const double x_prime = to.comm_exposed + to.bubble_time;
  const double h = std::max(0.0, from.comm_overlapped());
  const double h_prime = std::max(0.0, to.comm_overlapped());
  const double shared = std::min(h, h_prime);
  const double load = x + h;
  const double load_prime = x_prime + shared;
  if (load == 0.0 && load_prime == 0.0) {
    s.s_c = 1.0;
    s.ell = 0.0;
  } else if (load == 0.0) {
    s.s_c = std::numeric_limits<double>::infinity();
    s.ell = 0.0;
  } else if (load_prime == 0.0) {
    // p' removes every critical-path communication cost.
    s.s_c = std::numeric_limits<double>::min();
    s.ell = 0.0;
  } else {
    s.s_c = r * load_prime / load;
    s.ell = std::max(0.0, h - h_prime) / load_prime;
  }
  s.c = ShardCostFactor(p, p_prime, s.s_b, s.s_c, s.ell);
  return s;
}

ShardScaling EstimateScaleFactors(const TrainingWorkload& workload,
                                  const ClusterTopology& topology,
                                  const ParallelismConfig& config_p,
                                  const ParallelismConfig& config_p_prime,
                                  const CollectiveCostParams& cost_params,
                                  const Knobs& knobs) {
  return Decide(workload, topology, config_p, config_p_prime, cost_params,
                knobs)
      .scaling;
}

namespace {

int Sign(double x) {
  constexpr double kTol = 1e-12;
  if (x > kTol) return 1;
  if (x < -kTol) return -1;
  return 0;
}

}  // namespace

Decision Decide(const TrainingWorkload& workload,
                const ClusterTopology& topology,
                const ParallelismConfig& config_p,
                const ParallelismConfig& config_p_prime,
                const CollectiveCostParams& cost_params, const Knobs& knobs) {
  if (config_p.global_batch() != config_p_prime.global_batch()) {
    throw ConfigError("configs disagree on global batch: " +
                      std::to_string(config_p.global_batch()) + " vs " +
                      std::to_string(config_p_prime.global_batch()));
  }
  Decision d;
  d.from = SimulateStep(workload, config_p, topology, cost_params, knobs);
  d.to = SimulateStep(workload, config_p_prime, topology, cost_params, knobs);
  d.from_metrics = ComputeMetrics(d.from.breakdown, workload, config_p, topology);
  d.to_metrics =
      ComputeMetrics(d.to.breakdown, workload, config_p_prime, topology);
  d.scaling = ScaleFactorsFromBreakdowns(config_p.parallelism_factor(),
                                         config_p_prime.parallelism_factor(),
                                         d.from.breakdown, d.to.breakdown);
  d.improves = d.scaling.c > 1.0;
  d.simulated_throughput_ratio =
      d.to_metrics.wps_global / d.from_metrics.wps_global;
  const double c = d.scaling.c;
  d.agrees = Sign(std::isinf(c) ? 1.0 : c - 1.0) ==
             Sign(d.simulated_throughput_ratio - 1.0);
  return d;
}

}  // namespace shardsim
