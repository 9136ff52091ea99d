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

#ifndef SHARDSIM_SCENARIO_H_
#define SHARDSIM_SCENARIO_H_

#include "shardsim/collectives.h"
#include "shardsim/engine.h"
#include "shardsim/hardware.h"
#include "shardsim/parallelism.h"
#include "shardsim/workload.h"

namespace shardsim {

// Everything one simulation needs, before the topology is materialized.
struct Scenario {
  NodeSpec node = Preset(Generation::kH100);
  int num_nodes = 1;
  TrainingWorkload workload;
  ParallelismConfig parallelism;
  Knobs knobs;
  // Merged over DefaultCostParams of the scenario's topology.
  CollectiveCostParams cost_overrides;

  ClusterTopology topology() const { return ClusterTopology(node, num_nodes); }
};

CollectiveCostParams CostParamsFor(const ClusterTopology& topology,
                                   const CollectiveCostParams& overrides);

}  // namespace shardsim

#endif  // SHARDSIM_SCENARIO_H_
