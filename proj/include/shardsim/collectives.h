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

#ifndef SHARDSIM_COLLECTIVES_H_
#define SHARDSIM_COLLECTIVES_H_

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "shardsim/hardware.h"

namespace shardsim {

enum class CollectiveKind { kAllGather, kReduceScatter, kAllReduce, kPointToPoint };
enum class Algorithm { kRing, kTree, kDirect };

std::string_view CollectiveKindName(CollectiveKind kind);
std::optional<CollectiveKind> ParseCollectiveKind(std::string_view name);
std::string_view AlgorithmName(Algorithm algorithm);
std::optional<Algorithm> ParseAlgorithm(std::string_view name);

// payload_bytes is the full gathered (AllGather) or reduced (ReduceScatter)
// buffer, the buffer size for AllReduce and the message size for
// PointToPoint.
struct CommOp {
  CollectiveKind kind = CollectiveKind::kAllGather;
  double payload_bytes = 0.0;
  int group_size = 1;
  Span span = Span::kIntraNode;
  bool blocking = true;
};

// Throws ParameterError when the op breaks its invariants.
void CheckCommOp(const CommOp& op);

struct MeasuredBandwidthPoint {
  int group_size = 0;
  double message_bytes = 0.0;
  double bus_bandwidth = 0.0;  // bytes/s, collective-benchmark convention
};

struct CostEntry {
  double alpha = 0.0;  // s per algorithm step
  double beta = 0.0;   // effective bytes/s
  std::vector<MeasuredBandwidthPoint> measured_curve;
};

struct CostKey {
  CollectiveKind kind;
  Algorithm algorithm;
  Span span;
  auto operator<=>(const CostKey&) const = default;
};

class CollectiveCostParams {
 public:
  void Set(const CostKey& key, CostEntry entry);
  const CostEntry* Find(const CostKey& key) const;
  const std::map<CostKey, CostEntry>& entries() const { return entries_; }

  // Entries of `other` replace same-keyed entries here.
  void MergeFrom(const CollectiveCostParams& other);

  // AllReduce algorithm chosen per span.
  Algorithm allreduce_intra = Algorithm::kRing;
  Algorithm allreduce_cross = Algorithm::kTree;

  // False until any entry was fitted from measurements.
  bool calibrated = false;

 private:
  std::map<CostKey, CostEntry> entries_;
};

// Analytic entries for every (kind, algorithm, span) from the topology's
// link paths.
// Share of the nominal link rate that uncalibrated defaults assume a
// collective achieves.
inline constexpr double kDefaultLinkEfficiency = 0.85;

// Uncalibrated alpha-beta entries derived from the node's link figures.
CollectiveCostParams DefaultCostParams(const ClusterTopology& topology);

// Ring AllGather / ReduceScatter.
double RingTime(double payload_bytes, int group_size, double bottleneck_bw,
                double hop_latency);
// Ring AllReduce: a ReduceScatter followed by an AllGather.
double RingAllReduceTime(double payload_bytes, int group_size,
                         double bottleneck_bw, double hop_latency);
// Pipelined binomial-tree reduce followed by a broadcast.
double TreeAllReduceTime(double payload_bytes, int group_size,
                         double bottleneck_bw, double hop_latency);
double PointToPointTime(double payload_bytes, double bw, double hop_latency);

// ceil(log2(n)) for n >= 1.
int CeilLog2(int n);

// The algorithm `CollectiveTime` dispatches to for this op.
Algorithm SelectAlgorithm(const CommOp& op, const CollectiveCostParams& params);

// busbw = payload * (g-1)/g / t, doubled for AllReduce; payload / t for
// point-to-point. Infinite for zero time.
double BusBandwidth(CollectiveKind kind, double payload_bytes, int group_size,
                    double seconds);
// Inverse of BusBandwidth.
double TimeFromBusBandwidth(CollectiveKind kind, double payload_bytes,
                            int group_size, double bus_bandwidth);

// Bus bandwidth at (group_size, message_bytes): piecewise linear in
// log(message_bytes) within each measured group size, then linear in group
// size. Queries outside the measured range clamp to the nearest point.
double InterpolateBusBandwidth(std::span<const MeasuredBandwidthPoint> curve,
                               int group_size, double message_bytes);

double CollectiveTime(const CommOp& op, const CollectiveCostParams& params,
                      const ClusterTopology& topology);

// Least-squares (alpha, beta) for `kind` on the algorithm used over `span`,
// minimising relative time error. The points are kept as the measured curve.
// Throws FitError on underdetermined or degenerate input.
CollectiveCostParams FitCostParams(
    std::span<const MeasuredBandwidthPoint> points, CollectiveKind kind,
    Span span = Span::kCrossNode);

// Discrete-event playback of the collective schedule, one chunk transfer per
// rank per step. Independent check of the closed forms; group_size <= 64.
double EventOracleTime(const CommOp& op, Algorithm algorithm,
                       double bottleneck_bw, double hop_latency);

}  // namespace shardsim

#endif  // SHARDSIM_COLLECTIVES_H_
