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


#include "shardsim/engine.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "shardsim/errors.h"

namespace shardsim {

std::vector<std::string> CheckKnobs(const Knobs& knobs) {
  std::vector<std::string> errors;
  if (knobs.prefetch_depth < 0) errors.push_back("prefetch_depth must be >= 0");
  if (!(knobs.compute_efficiency > 0.0 && knobs.compute_efficiency <= 1.0)) {
    errors.push_back("compute_efficiency must be in (0, 1]");
  }
  if (!(knobs.s_b_exponent > 0.0 && knobs.s_b_exponent <= 1.0)) {
    errors.push_back("s_b_exponent must be in (0, 1]");
  }
  if (!(knobs.s_b_saturation > 0.0) || !std::isfinite(knobs.s_b_saturation)) {
    errors.push_back("s_b_saturation must be positive and finite");
  }
  if (!(knobs.tp_overlap >= 0.0 && knobs.tp_overlap <= 1.0)) {
    errors.push_back("tp_overlap must be in [0, 1]");
  }
  return errors;
}

double BatchEfficiencyScale(double sequences, const Knobs& knobs) {
  if (knobs.s_b_exponent >= 1.0 || sequences >= knobs.s_b_saturation) {
    return 1.0;
  }
  return std::pow(knobs.s_b_saturation / sequences, 1.0 - knobs.s_b_exponent);
}

double FlopsTime(double flops, double sequences, const GpuSpec& gpu,
                 const Knobs& knobs) {
  return flops / (gpu.peak_flops * knobs.compute_efficiency) *
         BatchEfficiencyScale(sequences, knobs);
}

double ComputeTime(const TrainingWorkload& workload,
                   const ParallelismConfig& config, const GpuSpec& gpu,
                   double efficiency) {
  Knobs knobs;
  knobs.compute_efficiency = efficiency;
  return ComputeTime(workload, config, gpu, knobs);
}

double ComputeTime(const TrainingWorkload& workload,
                   const ParallelismConfig& config, const GpuSpec& gpu,
                   const Knobs& knobs) {
  if (!(knobs.compute_efficiency > 0.0 && knobs.compute_efficiency <= 1.0)) {
    throw ParameterError("compute_efficiency must be in (0, 1]");
  }
  // Only the last stage carries the output head, so it is the slowest.
  const double flops = static_cast<double>(StageStepFlops(
      workload, config.local_batch, config.tp, config.pp, config.pp - 1));
  return config.grad_accum *
         FlopsTime(flops, config.microbatch_size(), gpu, knobs);
}

StreamSchedule ScheduleStreams(const std::vector<double>& compute,
                               const std::vector<CommItem>& comm) {
  const int n = static_cast<int>(compute.size());
  StreamSchedule s;
  s.compute_start.assign(n, 0.0);
  s.compute_end.assign(n, 0.0);
  s.comm_start.assign(comm.size(), 0.0);
  s.comm_end.assign(comm.size(), 0.0);
  std::vector<double> ready(n, 0.0);
  for (size_t k = 0; k < comm.size(); ++k) {
    if (k > 0 && comm[k].gate < comm[k - 1].gate) {
      throw ParameterError("comm items must be ordered by gate");
    }
    if (comm[k].gate >= n ||
        (comm[k].needed_by >= 0 && comm[k].needed_by <= comm[k].gate) ||
        comm[k].needed_by >= n) {
      throw ParameterError("comm item dependencies form a cycle");
    }
  }
  size_t next = 0;
  double comm_free = 0.0;
  auto schedule_through = [&](int gate_limit) {
    while (next < comm.size() && comm[next].gate <= gate_limit) {
      const CommItem& item = comm[next];
      const double gate_time = item.gate < 0 ? 0.0 : s.compute_end[item.gate];
      s.comm_start[next] = std::max(comm_free, gate_time);
      s.comm_end[next] = s.comm_start[next] + item.duration;
      comm_free = s.comm_end[next];
      if (item.needed_by >= 0) {
        ready[item.needed_by] = std::max(ready[item.needed_by], comm_free);
      }
      ++next;
    }
  };
  double compute_free = 0.0;
  for (int j = 0; j < n; ++j) {
    schedule_through(j - 1);
    s.compute_start[j] = std::max(compute_free, ready[j]);
    s.compute_end[j] = s.compute_start[j] + compute[j];
    compute_free = s.compute_end[j];
  }
  schedule_through(n);
  s.makespan = std::max(compute_free, comm_free);
  return s;
}

namespace {

std::string PhaseLabel(const char* pass, int layer) {
  return std::string(pass) + "." + std::to_string(layer);
}

StepBreakdown SimulateStage(const TrainingWorkload& workload,
                            const ParallelismConfig& config,
                            const ClusterTopology& topology,
                            const CollectiveCostParams& cost_params,
                            const Knobs& knobs, int stage) {
  const GpuSpec& gpu = topology.gpu();
  const int layers = static_cast<int>(workload.arch.num_layers / config.pp);
  const int accum = config.grad_accum;
  const int m = config.pipeline_microbatches();
  const double mb = config.microbatch_size();
  const bool last_stage = stage == config.pp - 1;

  const double layer_flops = static_cast<double>(
      LayerStepFlops(workload, config.local_batch, config.tp));
  const double head_flops =
      last_stage ? static_cast<double>(HeadStepFlops(
                       workload, config.local_batch, config.tp))
                 : 0.0;
  const double layer_fwd = FlopsTime(layer_flops / 3.0, mb, gpu, knobs);
  const double layer_bwd = FlopsTime(layer_flops * 2.0 / 3.0, mb, gpu, knobs);
  const double head_fwd = FlopsTime(head_flops / 3.0, mb, gpu, knobs);
  const double head_bwd = FlopsTime(head_flops * 2.0 / 3.0, mb, gpu, knobs);

  // Tensor-parallel AllReduces per layer and pass.
  double tp_comm = 0.0;
  for (const LayerOp& op : TpOps(workload, config, topology)) {
    if (op.layer == 0 && op.pass == Pass::kForward) {
      tp_comm += CollectiveTime(op.op, cost_params, topology);
    }
  }
  const double tp_exposed = tp_comm * (1.0 - knobs.tp_overlap);

  // FSDP collective durations by layer.
  const std::vector<LayerOp> fsdp = FsdpOps(workload, config, topology);
  std::vector<double> ag_fwd(layers, 0.0), ag_bwd(layers, 0.0),
      rs(layers, 0.0);
  bool has_ag_bwd = false;
  {
    std::vector<bool> seen_fwd(layers, false);
    for (const LayerOp& op : fsdp) {
      const double t = CollectiveTime(op.op, cost_params, topology);
      if (op.op.kind == CollectiveKind::kReduceScatter) {
        rs[op.layer] = t;
      } else if (op.pass == Pass::kForward) {
        ag_fwd[op.layer] = t;
      } else {
        ag_bwd[op.layer] = t;
        has_ag_bwd = true;
      }
    }
  }
  const bool has_fsdp = !fsdp.empty();

  // Compute tasks: per microstep, forward layers then backward layers.
  const int per_step = 2 * layers;
  const int n = per_step * accum;
  std::vector<double> durations(n), pure(n), tp_part(n, tp_exposed);
  std::vector<int> task_layer(n);
  std::vector<bool> task_fwd(n);
  struct Tagged {
    CommItem item;
    int order;  // AllGather before ReduceScatter at equal gate
    int task;   // phase the comm is attributed to
  };
  std::vector<Tagged> tagged;
  const int depth = knobs.prefetch_depth;
  for (int k = 0; k < accum; ++k) {
    for (int t = 0; t < per_step; ++t) {
      const int j = k * per_step + t;
      const bool fwd = t < layers;
      const int layer = fwd ? t : per_step - 1 - t;
      task_layer[j] = layer;
      task_fwd[j] = fwd;
      double c = fwd ? layer_fwd : layer_bwd;
      if (last_stage && fwd && layer == layers - 1) c += head_fwd;
      if (last_stage && !fwd && layer == layers - 1) c += head_bwd;
      pure[j] = c;
      durations[j] = c + tp_exposed;
      if (!has_fsdp) continue;
      const bool gather = fwd ? (k == 0 || has_ag_bwd) : has_ag_bwd;
      if (gather) {
        const double t_ag = fwd ? ag_fwd[layer] : ag_bwd[layer];
        tagged.push_back({{std::max(-1, j - depth - 1), j, t_ag}, 0, j});
      }
      if (!fwd && k == accum - 1) {
        tagged.push_back({{j, -1, rs[layer]}, 1, j});
      }
    }
  }
  std::stable_sort(tagged.begin(), tagged.end(),
                   [](const Tagged& a, const Tagged& b) {
                     if (a.item.gate != b.item.gate) {
                       return a.item.gate < b.item.gate;
                     }
                     return a.order < b.order;
                   });
  std::vector<CommItem> items;
  items.reserve(tagged.size());
  for (const Tagged& t : tagged) items.push_back(t.item);
  const StreamSchedule sched = ScheduleStreams(durations, items);

  StepBreakdown out;
  // Phases keyed by (pass, layer), aggregated over microsteps.
  std::vector<PhaseBreakdown> fwd_phase(layers), bwd_phase(layers);
  for (int i = 0; i < layers; ++i) {
    fwd_phase[i].label = PhaseLabel("fwd", i);
    bwd_phase[i].label = PhaseLabel("bwd", i);
  }
  double prev_end = 0.0;
  for (int j = 0; j < n; ++j) {
    PhaseBreakdown& p =
        task_fwd[j] ? fwd_phase[task_layer[j]] : bwd_phase[task_layer[j]];
    p.compute += pure[j];
    p.comm += tp_comm;
    p.exposed += (sched.compute_start[j] - prev_end) + tp_part[j];
    prev_end = sched.compute_end[j];
  }
  for (const Tagged& t : tagged) {
    PhaseBreakdown& p =
        task_fwd[t.task] ? fwd_phase[task_layer[t.task]]
                         : bwd_phase[task_layer[t.task]];
    p.comm += t.item.duration;
  }
  for (PhaseBreakdown& p : fwd_phase) out.per_phase.push_back(std::move(p));
  for (int i = layers - 1; i >= 0; --i) {
    out.per_phase.push_back(std::move(bwd_phase[i]));
  }
  PhaseBreakdown tail{"tail", 0.0, 0.0, sched.makespan - prev_end};
  out.per_phase.push_back(tail);

  // Pipeline sends hide behind the compute of neighbouring microbatches.
  PhaseBreakdown p2p{"p2p", 0.0, 0.0, 0.0};
  const PipelinePlan pipeline = PipelineSchedulePlan(workload, config, topology);
  if (!pipeline.ops.empty()) {
    const double t_send = CollectiveTime(pipeline.ops.front(), cost_params,
                                         topology);
    double fwd_compute = 0.0, bwd_compute = 0.0;
    for (int j = 0; j < per_step; ++j) {
      (task_fwd[j] ? fwd_compute : bwd_compute) += pure[j];
    }
    int directions = 0;
    double exposed = 0.0;
    if (stage < config.pp - 1) {
      ++directions;
      exposed += std::max(0.0, t_send - fwd_compute / m);
    }
    if (stage > 0) {
      ++directions;
      exposed += std::max(0.0, t_send - bwd_compute / m);
    }
    p2p.comm = static_cast<double>(accum) * m * directions * t_send;
    p2p.exposed = static_cast<double>(accum) * m * exposed;
  }
  out.per_phase.push_back(p2p);

  for (const PhaseBreakdown& p : out.per_phase) {
    out.compute_time += p.compute;
    out.comm_total += p.comm;
    out.comm_exposed += p.exposed;
  }
  out.bubble_time = pipeline.bubble_fraction *
                    (out.compute_time + out.comm_exposed);
  out.step_time = out.compute_time + out.comm_exposed + out.bubble_time;
  return out;
}

std::string JoinViolations(const std::vector<Violation>& violations) {
  std::string out;
  for (const Violation& v : violations) {
    if (v.severity != Violation::Severity::kError) continue;
    if (!out.empty()) out += "; ";
    out += v.path + ": " + v.message;
  }
  return out;
}

}  // namespace

SimulationResult SimulateStep(const TrainingWorkload& workload,
                              const ParallelismConfig& config,
                              const ClusterTopology& topology,
                              const CollectiveCostParams& cost_params,
                              const Knobs& knobs) {
  const std::vector<std::string> knob_errors = CheckKnobs(knobs);
  if (!knob_errors.empty()) throw ConfigError("knobs: " + knob_errors.front());
  const std::vector<Violation> violations =
      Validate(config, topology, workload);
  if (HasErrors(violations)) throw ConfigError(JoinViolations(violations));

  SimulationResult result;
  result.memory = MemoryPerGpu(workload, config);
  for (const Violation& v : violations) {
    if (v.severity == Violation::Severity::kInfeasible) {
      result.feasible = false;
      result.infeasibility = v.message;
    }
  }
  for (int stage = 0; stage < config.pp; ++stage) {
    StepBreakdown b =
        SimulateStage(workload, config, topology, cost_params, knobs, stage);
    if (stage == 0 || b.step_time > result.breakdown.step_time) {
      result.breakdown = std::move(b);
      result.critical_stage = stage;
    }
  }
  return result;
}

}  // namespace shardsim
