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

#ifndef SHARDSIM_HARDWARE_H_
#define SHARDSIM_HARDWARE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shardsim {

inline constexpr double kGiB = 1024.0 * 1024.0 * 1024.0;

enum class Generation { kV100, kA100, kH100 };

// Whether a communication group stays inside one node or crosses the fabric.
enum class Span { kIntraNode, kCrossNode };

std::string_view GenerationName(Generation generation);
std::optional<Generation> ParseGeneration(std::string_view name);
std::string_view SpanName(Span span);

struct GpuSpec {
  std::string name;
  double peak_flops = 0.0;       // bf16 dense, FLOP/s
  double hbm_bandwidth = 0.0;    // bytes/s
  double memory_capacity = 0.0;  // bytes
  double power_peak = 0.0;       // W
  double power_idle = 0.0;       // W
};

struct NodeSpec {
  GpuSpec gpu;
  int gpus_per_node = 8;
  double intranode_bandwidth = 0.0;  // bytes/s per GPU
  double internode_bandwidth = 0.0;  // bytes/s per node
  double intranode_latency = 0.0;    // s per hop
  double internode_latency = 0.0;    // s per hop
};

// Empty when the spec is usable; otherwise one message per broken invariant.
std::vector<std::string> CheckGpuSpec(const GpuSpec& gpu);
std::vector<std::string> CheckNodeSpec(const NodeSpec& node);

// DGX-class node with eight GPUs, populated from vendor datasheet figures.
// Hop latencies and power figures are defaults meant to be calibrated.
NodeSpec Preset(Generation generation);

class ClusterTopology {
 public:
  // Throws ConfigError if the node spec is invalid or num_nodes < 1.
  ClusterTopology(NodeSpec node, int num_nodes);

  const NodeSpec& node() const { return node_; }
  const GpuSpec& gpu() const { return node_.gpu; }
  int num_nodes() const { return num_nodes_; }
  int gpus_per_node() const { return node_.gpus_per_node; }
  int world_size() const { return num_nodes_ * node_.gpus_per_node; }

 private:
  NodeSpec node_;
  int num_nodes_;
};

struct LinkPath {
  double bandwidth;  // bottleneck bytes/s seen by one rank
  double latency;    // s per hop
};

// Bottleneck link for a collective over `group_size` ranks. Cross-node
// groups see the node NIC budget split evenly across the node's GPUs.
// Singleton groups need no link and report infinite bandwidth.
LinkPath FindLinkPath(const ClusterTopology& topology, int group_size,
                      Span span);

// Span of a group of `group_size` ranks laid out `stride` ranks apart.
Span GroupSpan(const ClusterTopology& topology, int group_size, int stride);

}  // namespace shardsim

#endif  // SHARDSIM_HARDWARE_H_
