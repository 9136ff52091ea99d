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

#include "shardsim/collectives.h"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "shardsim/errors.h"

namespace shardsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kOracleMaxGroup = 64;

void CheckLink(double bw, double latency) {
  if (!(bw > 0)) throw ParameterError("bottleneck bandwidth must be > 0");
  if (!(latency >= 0)) throw ParameterError("hop latency must be >= 0");
}

// Linear interpolation of bus bandwidth in log(bytes) over points sharing one
// group size, sorted by message size.
double InterpolateInBytes(const std::vector<MeasuredBandwidthPoint>& points,
                          double message_bytes) {
  if (message_bytes <= points.front().message_bytes) {
    return points.front().bus_bandwidth;
  }
  if (message_bytes >= points.back().message_bytes) {
    return points.back().bus_bandwidth;
  }
  auto hi = std::upper_bound(
      points.begin(), points.end(), message_bytes,
      [](double b, const MeasuredBandwidthPoint& p) { return b < p.message_bytes; });
  auto lo = std::prev(hi);
  const double x0 = std::log(lo->message_bytes);
  const double x1 = std::log(hi->message_bytes);
  const double t = (std::log(message_bytes) - x0) / (x1 - x0);
  return lo->bus_bandwidth + t * (hi->bus_bandwidth - lo->bus_bandwidth);
}

// Coefficients (a, b) of t = a * alpha + b / beta for the analytic model of
// `kind` on `algorithm`.
std::pair<double, double> ModelCoefficients(CollectiveKind kind,
                                            Algorithm algorithm,
                                            double payload, int g) {
  const double steps_ring = g - 1;
  const double frac = static_cast<double>(g - 1) / g;
  switch (kind) {
    case CollectiveKind::kAllGather:
    case CollectiveKind::kReduceScatter:
      return {steps_ring, frac * payload};
    case CollectiveKind::kAllReduce:
      if (algorithm == Algorithm::kTree) {
        return {2.0 * CeilLog2(g), 2.0 * payload};
      }
      return {2.0 * steps_ring, 2.0 * frac * payload};
    case CollectiveKind::kPointToPoint:
      return {1.0, payload};
  }
  return {0.0, 0.0};
}

Algorithm FitAlgorithm(CollectiveKind kind, Span span) {
  switch (kind) {
    case CollectiveKind::kAllReduce:
      return span == Span::kCrossNode ? Algorithm::kTree : Algorithm::kRing;
    case CollectiveKind::kPointToPoint:
      return Algorithm::kDirect;
    default:
      return Algorithm::kRing;
  }
}

double RingOracle(double chunk_bytes, int group_size, int steps, double bw,
                  double latency) {
  // ready[r]: when rank r holds the chunk it forwards next.
  std::vector<double> ready(group_size, 0.0);
  std::vector<double> send_free(group_size, 0.0);
  std::vector<double> recv_free(group_size, 0.0);
  double finish = 0.0;
  for (int step = 0; step < steps; ++step) {
    std::vector<double> next_ready(group_size, 0.0);
    for (int r = 0; r < group_size; ++r) {
      const int dst = (r + 1) % group_size;
      const double start = std::max({ready[r], send_free[r], recv_free[dst]});
      const double end = start + latency + chunk_bytes / bw;
      send_free[r] = end;
      recv_free[dst] = end;
      next_ready[dst] = end;
      finish = std::max(finish, end);
    }
    ready = std::move(next_ready);
  }
  return finish;
}

// Binomial-tree reduce to rank 0 then broadcast back. Each message is
// streamed: its head lands one hop latency after it is issued and its tail a
// full payload transfer later; a rank forwards as soon as heads arrive.
double TreeOracle(double payload, int group_size, double bw, double latency) {
  const int rounds = CeilLog2(group_size);
  const double transfer = payload / bw;
  std::vector<double> head(group_size, 0.0);
  std::vector<double> tail(group_size, 0.0);
  for (int k = 0; k < rounds; ++k) {
    const int half = 1 << k;
    for (int r = 0; r < group_size; ++r) {
      if (r % (2 * half) != half) continue;
      const int dst = r - half;
      const double start = std::max(head[r], head[dst]);
      head[r] = start + latency;
      head[dst] = start + latency;
      tail[dst] = std::max({tail[dst], start + latency + transfer,
                            tail[r] + latency});
    }
  }
  const double reduced = tail[0];
  std::vector<double> bhead(head);
  std::vector<double> btail(group_size, -kInf);
  bhead[0] = reduced;
  btail[0] = reduced;
  for (int k = rounds - 1; k >= 0; --k) {
    const int half = 1 << k;
    for (int r = 0; r + half < group_size; r += 2 * half) {
      const int dst = r + half;
      const double start = std::max(bhead[r], std::max(bhead[dst], reduced));
      bhead[r] = start + latency;
      bhead[dst] = start + latency;
      btail[dst] = std::max(start + latency + transfer, btail[r] + latency);
    }
  }
  return *std::max_element(btail.begin(), btail.end());
}

}  // namespace

std::string_view CollectiveKindName(CollectiveKind kind) {
  switch (kind) {
    case CollectiveKind::kAllGather:
      return "AllGather";
    case CollectiveKind::kReduceScatter:
      return "ReduceScatter";
    case CollectiveKind::kAllReduce:
      return "AllReduce";
    case CollectiveKind::kPointToPoint:
      return "PointToPoint";
  }
  return "unknown";
}

std::optional<CollectiveKind> ParseCollectiveKind(std::string_view name) {
  for (CollectiveKind k :
       {CollectiveKind::kAllGather, CollectiveKind::kReduceScatter,
        CollectiveKind::kAllReduce, CollectiveKind::kPointToPoint}) {
    if (name == CollectiveKindName(k)) return k;
  }
  return std::nullopt;
}

std::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kRing:
      return "ring";
    case Algorithm::kTree:
      return "tree";
    case Algorithm::kDirect:
      return "direct";
  }
  return "unknown";
}

std::optional<Algorithm> ParseAlgorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kRing, Algorithm::kTree, Algorithm::kDirect}) {
    if (name == AlgorithmName(a)) return a;
  }
  return std::nullopt;
}

void CheckCommOp(const CommOp& op) {
  if (!(op.payload_bytes >= 0)) {
    throw ParameterError("payload_bytes must be >= 0");
  }
  if (op.group_size < 1) throw ParameterError("group_size must be >= 1");
  if (op.kind == CollectiveKind::kPointToPoint && op.group_size != 2) {
    throw ParameterError("point-to-point ops have exactly two ranks");
  }
}

void CollectiveCostParams::Set(const CostKey& key, CostEntry entry) {
  entries_[key] = std::move(entry);
}

const CostEntry* CollectiveCostParams::Find(const CostKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void CollectiveCostParams::MergeFrom(const CollectiveCostParams& other) {
  for (const auto& [key, entry] : other.entries()) entries_[key] = entry;
  calibrated = calibrated || other.calibrated;
}

CollectiveCostParams DefaultCostParams(const ClusterTopology& topology) {
  const NodeSpec& node = topology.node();
  const std::pair<Span, CostEntry> links[] = {
      {Span::kIntraNode,
       {node.intranode_latency,
        kDefaultLinkEfficiency * node.intranode_bandwidth,
        {}}},
      {Span::kCrossNode,
       {node.internode_latency,
        kDefaultLinkEfficiency * node.internode_bandwidth / node.gpus_per_node,
        {}}}};
  CollectiveCostParams params;
  for (const auto& [span, entry] : links) {
    params.Set({CollectiveKind::kAllGather, Algorithm::kRing, span}, entry);
    params.Set({CollectiveKind::kReduceScatter, Algorithm::kRing, span}, entry);
    params.Set({CollectiveKind::kAllReduce, Algorithm::kRing, span}, entry);
    params.Set({CollectiveKind::kAllReduce, Algorithm::kTree, span}, entry);
    params.Set({CollectiveKind::kPointToPoint, Algorithm::kDirect, span}, entry);
  }
  return params;
}

int CeilLog2(int n) {
  int k = 0;
  while ((1L << k) < n) ++k;
  return k;
}

double RingTime(double payload_bytes, int group_size, double bottleneck_bw,
                double hop_latency) {
  if (group_size < 1) throw ParameterError("group_size must be >= 1");
  CheckLink(bottleneck_bw, hop_latency);
  if (group_size == 1) return 0.0;
  return (group_size - 1) *
         (hop_latency + (payload_bytes / group_size) / bottleneck_bw);
}

double RingAllReduceTime(double payload_bytes, int group_size,
                         double bottleneck_bw, double hop_latency) {
  return 2.0 * RingTime(payload_bytes, group_size, bottleneck_bw, hop_latency);
}

double TreeAllReduceTime(double payload_bytes, int group_size,
                         double bottleneck_bw, double hop_latency) {
  if (group_size < 1) throw ParameterError("group_size must be >= 1");
  CheckLink(bottleneck_bw, hop_latency);
  if (group_size == 1) return 0.0;
  return 2.0 * CeilLog2(group_size) * hop_latency +
         2.0 * payload_bytes / bottleneck_bw;
}

double PointToPointTime(double payload_bytes, double bw, double hop_latency) {
  CheckLink(bw, hop_latency);
  return hop_latency + payload_bytes / bw;
}

Algorithm SelectAlgorithm(const CommOp& op, const CollectiveCostParams& params) {
  switch (op.kind) {
    case CollectiveKind::kAllReduce:
      return op.span == Span::kCrossNode ? params.allreduce_cross
                                         : params.allreduce_intra;
    case CollectiveKind::kPointToPoint:
      return Algorithm::kDirect;
    default:
      return Algorithm::kRing;
  }
}

double BusBandwidth(CollectiveKind kind, double payload_bytes, int group_size,
                    double seconds) {
  if (seconds <= 0) return kInf;
  const double frac = static_cast<double>(group_size - 1) / group_size;
  switch (kind) {
    case CollectiveKind::kAllReduce:
      return 2.0 * payload_bytes * frac / seconds;
    case CollectiveKind::kPointToPoint:
      return payload_bytes / seconds;
    default:
      return payload_bytes * frac / seconds;
  }
}

double TimeFromBusBandwidth(CollectiveKind kind, double payload_bytes,
                            int group_size, double bus_bandwidth) {
  if (!(bus_bandwidth > 0)) throw ParameterError("bus bandwidth must be > 0");
  const double frac = static_cast<double>(group_size - 1) / group_size;
  switch (kind) {
    case CollectiveKind::kAllReduce:
      return 2.0 * payload_bytes * frac / bus_bandwidth;
    case CollectiveKind::kPointToPoint:
      return payload_bytes / bus_bandwidth;
    default:
      return payload_bytes * frac / bus_bandwidth;
  }
}

double InterpolateBusBandwidth(std::span<const MeasuredBandwidthPoint> curve,
                               int group_size, double message_bytes) {
  if (curve.empty()) throw ParameterError("empty measured curve");
  std::map<int, std::vector<MeasuredBandwidthPoint>> by_group;
  for (const MeasuredBandwidthPoint& p : curve) by_group[p.group_size].push_back(p);
  for (auto& [g, points] : by_group) {
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) {
                return a.message_bytes < b.message_bytes;
              });
  }
  auto hi = by_group.lower_bound(group_size);
  if (hi == by_group.end()) {
    return InterpolateInBytes(std::prev(hi)->second, message_bytes);
  }
  if (hi->first == group_size || hi == by_group.begin()) {
    return InterpolateInBytes(hi->second, message_bytes);
  }
  auto lo = std::prev(hi);
  const double b0 = InterpolateInBytes(lo->second, message_bytes);
  const double b1 = InterpolateInBytes(hi->second, message_bytes);
  const double t = static_cast<double>(group_size - lo->first) /
                   static_cast<double>(hi->first - lo->first);
  return b0 + t * (b1 - b0);
}

double CollectiveTime(const CommOp& op, const CollectiveCostParams& params,
                      const ClusterTopology& topology) {
  CheckCommOp(op);
  if (op.group_size > topology.world_size()) {
    throw ConfigError("collective over " + std::to_string(op.group_size) +
                      " ranks exceeds world size " +
                      std::to_string(topology.world_size()));
  }
  if (op.group_size == 1) return 0.0;
  const Span span =
      op.span == Span::kIntraNode && op.group_size <= topology.gpus_per_node()
          ? Span::kIntraNode
          : Span::kCrossNode;
  CommOp routed = op;
  routed.span = span;
  const Algorithm algorithm = SelectAlgorithm(routed, params);
  const CostEntry* entry = params.Find({op.kind, algorithm, span});
  if (entry == nullptr) {
    throw ConfigError("no cost parameters for " +
                      std::string(CollectiveKindName(op.kind)) + "/" +
                      std::string(AlgorithmName(algorithm)) + "/" +
                      std::string(SpanName(span)));
  }
  if (!entry->measured_curve.empty()) {
    const double busbw = InterpolateBusBandwidth(entry->measured_curve,
                                                 op.group_size, op.payload_bytes);
    return TimeFromBusBandwidth(op.kind, op.payload_bytes, op.group_size, busbw);
  }
  switch (op.kind) {
    case CollectiveKind::kAllGather:
    case CollectiveKind::kReduceScatter:
      return RingTime(op.payload_bytes, op.group_size, entry->beta, entry->alpha);
    case CollectiveKind::kAllReduce:
      return algorithm == Algorithm::kTree
                 ? TreeAllReduceTime(op.payload_bytes, op.group_size,
                                     entry->beta, entry->alpha)
                 : RingAllReduceTime(op.payload_bytes, op.group_size,
                                     entry->beta, entry->alpha);
    case CollectiveKind::kPointToPoint:
      return PointToPointTime(op.payload_bytes, entry->beta, entry->alpha);
  }
  return 0.0;
}

CollectiveCostParams FitCostParams(
    std::span<const MeasuredBandwidthPoint> points, CollectiveKind kind,
    Span span) {
  if (points.size() < 2) {
    throw FitError("need at least 2 measurements to fit alpha and beta, got " +
                   std::to_string(points.size()));
  }
  std::set<double> sizes;
  std::set<std::pair<int, double>> seen;
  for (const MeasuredBandwidthPoint& p : points) {
    if (p.group_size < 2 || !(p.message_bytes > 0) || !(p.bus_bandwidth > 0)) {
      throw FitError("measurements need group_size >= 2 and positive bytes "
                     "and bandwidth");
    }
    if (!seen.insert({p.group_size, p.message_bytes}).second) {
      throw FitError("duplicate measurement at group_size " +
                     std::to_string(p.group_size) + ", message_bytes " +
                     std::to_string(p.message_bytes));
    }
    sizes.insert(p.message_bytes);
  }
  if (sizes.size() < 2) {
    throw FitError("all measurements share one message size; latency and "
                   "bandwidth cannot be separated");
  }
  const Algorithm algorithm = FitAlgorithm(kind, span);
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd target = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const MeasuredBandwidthPoint& p = points[i];
    const double t = TimeFromBusBandwidth(kind, p.message_bytes, p.group_size,
                                          p.bus_bandwidth);
    const auto [a, b] = ModelCoefficients(kind, algorithm, p.message_bytes,
                                          p.group_size);
    // Rows are scaled by 1/t so every point weighs by its relative error.
    design(i, 0) = a / t;
    design(i, 1) = b / t;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 2) {
    throw FitError("measurements are collinear in (latency steps, bytes); "
                   "vary group size or message size");
  }
  Eigen::VectorXd x = qr.solve(target);
  double alpha = x(0);
  double inv_beta = x(1);
  if (alpha < 0) {
    // Latency is not resolvable above noise; refit bandwidth alone.
    alpha = 0.0;
    inv_beta = design.col(1).dot(target) / design.col(1).squaredNorm();
  }
  if (!(inv_beta > 0)) {
    throw FitError("fitted bandwidth is not positive; measurements do not "
                   "follow a latency-bandwidth model");
  }
  CostEntry entry;
  entry.alpha = alpha;
  entry.beta = 1.0 / inv_beta;
  entry.measured_curve.assign(points.begin(), points.end());
  CollectiveCostParams params;
  params.Set({kind, algorithm, span}, std::move(entry));
  params.calibrated = true;
  return params;
}

double EventOracleTime(const CommOp& op, Algorithm algorithm,
                       double bottleneck_bw, double hop_latency) {
  CheckCommOp(op);
  CheckLink(bottleneck_bw, hop_latency);
  if (op.group_size > kOracleMaxGroup) {
    throw ParameterError("event oracle is limited to 64 ranks");
  }
  const int g = op.group_size;
  if (g == 1) return 0.0;
  switch (op.kind) {
    case CollectiveKind::kAllGather:
    case CollectiveKind::kReduceScatter:
      return RingOracle(op.payload_bytes / g, g, g - 1, bottleneck_bw,
                        hop_latency);
    case CollectiveKind::kAllReduce:
      if (algorithm == Algorithm::kTree) {
        return TreeOracle(op.payload_bytes, g, bottleneck_bw, hop_latency);
      }
      return RingOracle(op.payload_bytes / g, g, 2 * (g - 1), bottleneck_bw,
                        hop_latency);
    case CollectiveKind::kPointToPoint:
      return RingOracle(op.payload_bytes, 2, 1, bottleneck_bw, hop_latency);
  }
  return 0.0;
}

}  // namespace shardsim
