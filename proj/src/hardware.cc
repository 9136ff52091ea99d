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

#include "shardsim/hardware.h"

#include <limits>
#include <utility>

#include "shardsim/errors.h"

namespace shardsim {
namespace {

constexpr double kTera = 1e12;
constexpr double kGiga = 1e9;

// Per-hop latencies are not published alongside the bandwidth figures; these
// are typical NVLink/InfiniBand software+wire latencies for NCCL-style rings.
constexpr double kNvlinkHopLatency = 2e-6;
constexpr double kInfinibandHopLatency = 5e-6;

constexpr double kIdlePowerFraction = 0.6;

GpuSpec MakeGpu(std::string name, double peak_flops, double hbm,
                double memory, double power_peak) {
  return GpuSpec{std::move(name), peak_flops,
                 hbm,             memory,
                 power_peak,      kIdlePowerFraction * power_peak};
}

}  // namespace

std::string_view GenerationName(Generation generation) {
  switch (generation) {
    case Generation::kV100:
      return "v100";
    case Generation::kA100:
      return "a100";
    case Generation::kH100:
      return "h100";
  }
  return "unknown";
}

std::optional<Generation> ParseGeneration(std::string_view name) {
  for (Generation g : {Generation::kV100, Generation::kA100, Generation::kH100}) {
    if (name == GenerationName(g)) return g;
  }
  return std::nullopt;
}

std::string_view SpanName(Span span) {
  return span == Span::kIntraNode ? "intra_node" : "cross_node";
}

std::vector<std::string> CheckGpuSpec(const GpuSpec& gpu) {
  std::vector<std::string> errors;
  if (!(gpu.peak_flops > 0)) errors.push_back("peak_flops must be > 0");
  if (!(gpu.hbm_bandwidth > 0)) errors.push_back("hbm_bandwidth must be > 0");
  if (!(gpu.memory_capacity >= kGiB)) {
    errors.push_back("memory_capacity must be at least 1 GiB");
  }
  if (!(gpu.power_peak > 0)) errors.push_back("power_peak must be > 0");
  if (!(gpu.power_idle > 0)) errors.push_back("power_idle must be > 0");
  if (!(gpu.power_idle < gpu.power_peak)) {
    errors.push_back("power_idle must be below power_peak");
  }
  return errors;
}

std::vector<std::string> CheckNodeSpec(const NodeSpec& node) {
  std::vector<std::string> errors = CheckGpuSpec(node.gpu);
  if (node.gpus_per_node < 1) errors.push_back("gpus_per_node must be >= 1");
  if (!(node.intranode_bandwidth > 0)) {
    errors.push_back("intranode_bandwidth must be > 0");
  }
  if (!(node.internode_bandwidth > 0)) {
    errors.push_back("internode_bandwidth must be > 0");
  }
  if (node.gpus_per_node >= 1 &&
      node.intranode_bandwidth <
          node.internode_bandwidth / node.gpus_per_node) {
    errors.push_back(
        "intranode_bandwidth must be at least the per-GPU share of "
        "internode_bandwidth");
  }
  if (!(node.intranode_latency >= 0) || !(node.internode_latency >= 0)) {
    errors.push_back("latencies must be >= 0");
  }
  return errors;
}

NodeSpec Preset(Generation generation) {
  NodeSpec node;
  node.gpus_per_node = 8;
  node.intranode_latency = kNvlinkHopLatency;
  node.internode_latency = kInfinibandHopLatency;
  switch (generation) {
    case Generation::kV100:
      node.gpu = MakeGpu("V100", 125 * kTera, 900 * kGiga, 32 * kGiB, 300);
      node.intranode_bandwidth = 300 * kGiga;
      node.internode_bandwidth = 100 * kGiga;
      break;
    case Generation::kA100:
      node.gpu = MakeGpu("A100", 312 * kTera, 2 * kTera, 80 * kGiB, 400);
      node.intranode_bandwidth = 600 * kGiga;
      node.internode_bandwidth = 200 * kGiga;
      break;
    case Generation::kH100:
      node.gpu = MakeGpu("H100", 990 * kTera, 3.35 * kTera, 80 * kGiB, 700);
      node.intranode_bandwidth = 900 * kGiga;
      node.internode_bandwidth = 400 * kGiga;
      break;
  }
  return node;
}

ClusterTopology::ClusterTopology(NodeSpec node, int num_nodes)
    : node_(std::move(node)), num_nodes_(num_nodes) {
  std::vector<std::string> errors = CheckNodeSpec(node_);
  if (num_nodes_ < 1) errors.push_back("num_nodes must be >= 1");
  if (!errors.empty()) {
    std::string message = "invalid cluster topology:";
    for (const std::string& e : errors) message += " " + e + ";";
    throw ConfigError(message);
  }
}

LinkPath FindLinkPath(const ClusterTopology& topology, int group_size,
                      Span span) {
  if (group_size < 1 || group_size > topology.world_size()) {
    throw ConfigError("group size " + std::to_string(group_size) +
                      " outside cluster of " +
                      std::to_string(topology.world_size()) + " GPUs");
  }
  if (group_size == 1) {
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  const NodeSpec& node = topology.node();
  if (span == Span::kIntraNode && group_size <= node.gpus_per_node) {
    return {node.intranode_bandwidth, node.intranode_latency};
  }
  return {node.internode_bandwidth / node.gpus_per_node,
          node.internode_latency};
}

Span GroupSpan(const ClusterTopology& topology, int group_size, int stride) {
  // Ranks are laid out node-major, so a group stays local iff its extent
  // fits inside one node.
  const long extent = static_cast<long>(group_size - 1) * stride + 1;
  return group_size > 1 && extent > topology.gpus_per_node() ? Span::kCrossNode
                                                             : Span::kIntraNode;
}

}  // namespace shardsim
