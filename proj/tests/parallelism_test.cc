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


#include "shardsim/parallelism.h"

#include <algorithm>
#include <string>

#include <gtest/gtest.h>

#include "shardsim/errors.h"
#include "shardsim/workload.h"

namespace shardsim {
namespace {

TrainingWorkload Llama7b(std::int64_t global_batch) {
  TrainingWorkload w;
  w.arch = *ModelPreset("7b");
  w.seq_len = 4096;
  w.global_batch = global_batch;
  return w;
}

ParallelismConfig Config(int dp, int tp, int pp, std::int64_t local_batch,
                         int microbatches = 1) {
  ParallelismConfig c;
  c.dp_shard = dp;
  c.tp = tp;
  c.pp = pp;
  c.local_batch = local_batch;
  c.num_microbatches = microbatches;
  return c;
}

bool HasMessage(const std::vector<Violation>& v, const std::string& text) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) {
    return x.message.find(text) != std::string::npos;
  });
}

TEST(ParallelismConfigTest, DerivedQuantities) {
  ParallelismConfig c = Config(8, 2, 4, 16, 8);
  c.grad_accum = 2;
  EXPECT_EQ(c.parallelism_factor(), 8);
  EXPECT_EQ(c.world_size(), 64);
  EXPECT_EQ(c.global_batch(), 256);
  EXPECT_DOUBLE_EQ(c.microbatch_size(), 2.0);
  EXPECT_EQ(c.pipeline_microbatches(), 8);
  c.pp = 1;
  EXPECT_DOUBLE_EQ(c.microbatch_size(), 16.0);
  EXPECT_EQ(c.pipeline_microbatches(), 1);
}

TEST(ParallelismConfigTest, GlobalBatchFromWorldAndParallelismFactor) {
  // n = 256 GPUs, p = 8, b = 16 gives n * b / p sequences per step.
  const ParallelismConfig c = Config(256 / 8, 4, 2, 16, 2);
  EXPECT_EQ(c.global_batch(), 512);
}

TEST(ShardingModeTest, NamesRoundTrip) {
  for (ShardingMode m : {ShardingMode::kZero2, ShardingMode::kZero3}) {
    EXPECT_EQ(ParseShardingMode(ShardingModeName(m)), m);
  }
  EXPECT_FALSE(ParseShardingMode("zero1").has_value());
}

TEST(ValidateTest, ConsistentProductIsOk) {
  const ClusterTopology t(Preset(Generation::kH100), 32);
  const auto v = Validate(Config(64, 2, 2, 2, 2), t, Llama7b(128));
  EXPECT_TRUE(v.empty()) << v.front().message;
}

TEST(ValidateTest, ProductMismatch) {
  const ClusterTopology t(Preset(Generation::kH100), 32);
  const auto v = Validate(Config(100, 2, 2, 2, 2), t, Llama7b(200));
  EXPECT_TRUE(HasErrors(v));
  EXPECT_TRUE(HasMessage(v, "product mismatch"));
  EXPECT_EQ(v.front().path, "/parallelism");
}

TEST(ValidateTest, GlobalBatchMismatch) {
  const ClusterTopology t(Preset(Generation::kH100), 1);
  const auto v = Validate(Config(8, 1, 1, 2), t, Llama7b(32));
  EXPECT_TRUE(HasMessage(v, "global batch mismatch"));
}

TEST(ValidateTest, TooFewMicrobatches) {
  const ClusterTopology t(Preset(Generation::kH100), 1);
  const auto v = Validate(Config(2, 1, 4, 4, 2), t, Llama7b(8));
  EXPECT_TRUE(HasErrors(v));
  EXPECT_EQ(v.front().path, "/parallelism/microbatches");
}

TEST(ValidateTest, DivisibilityViolations) {
  const ClusterTopology t(Preset(Generation::kH100), 3);
  auto v = Validate(Config(8, 3, 1, 1), t, Llama7b(8));
  EXPECT_TRUE(HasMessage(v, "must divide num_heads"));
  v = Validate(Config(8, 1, 3, 3, 3), t, Llama7b(24));
  EXPECT_TRUE(HasMessage(v, "must divide num_layers"));
}

TEST(ValidateTest, NonPositiveDegrees) {
  const ClusterTopology t(Preset(Generation::kH100), 1);
  const auto v = Validate(Config(0, 1, 1, 1), t, Llama7b(1));
  EXPECT_TRUE(HasErrors(v));
  EXPECT_EQ(v.front().path, "/parallelism/dp_shard");
}

TEST(ValidateTest, MemoryOverflowIsInfeasibleNotError) {
  const ClusterTopology t(Preset(Generation::kH100), 1);
  const auto v = Validate(Config(1, 1, 1, 1), ClusterTopology(
                                                  [] {
                                                    NodeSpec n = Preset(
                                                        Generation::kH100);
                                                    n.gpus_per_node = 1;
                                                    return n;
                                                  }(),
                                                  1),
                          Llama7b(1));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.front().severity, Violation::Severity::kInfeasible);
  EXPECT_FALSE(HasErrors(v));
}

TEST(SpanTest, GroupsFollowRankLayout) {
  const ClusterTopology t(Preset(Generation::kH100), 4);
  EXPECT_EQ(TensorParallelSpan(t, Config(4, 8, 1, 1)), Span::kIntraNode);
  EXPECT_EQ(TensorParallelSpan(t, Config(2, 16, 1, 1)), Span::kCrossNode);
  EXPECT_EQ(DataParallelSpan(t, Config(32, 1, 1, 1)), Span::kCrossNode);
  EXPECT_EQ(DataParallelSpan(t, Config(4, 8, 1, 1)), Span::kCrossNode);
  EXPECT_EQ(PipelineSpan(t, Config(8, 2, 2, 2, 2)), Span::kIntraNode);
  EXPECT_EQ(PipelineSpan(t, Config(4, 8, 1, 1)), Span::kIntraNode);
  EXPECT_EQ(PipelineSpan(t, Config(1, 8, 4, 4, 4)), Span::kCrossNode);
}

TEST(FsdpOpsTest, NoShardingNoCollectives) {
  const ClusterTopology t(Preset(Generation::kH100), 1);
  EXPECT_TRUE(FsdpOps(Llama7b(8), Config(1, 8, 1, 8), t).empty());
}

TEST(FsdpOpsTest, OneGatherAndScatterPerLayer) {
  const ClusterTopology t(Preset(Generation::kH100), 2);
  const TrainingWorkload w = Llama7b(16);
  const auto ops = FsdpOps(w, Config(16, 1, 1, 1), t);
  int gathers = 0;
  int scatters = 0;
  double gathered = 0.0;
  for (const LayerOp& op : ops) {
    EXPECT_EQ(op.op.group_size, 16);
    EXPECT_EQ(op.op.span, Span::kCrossNode);
    if (op.op.kind == CollectiveKind::kAllGather) {
      ++gathers;
      gathered += op.op.payload_bytes;
      EXPECT_TRUE(op.op.blocking);
      EXPECT_EQ(op.pass, Pass::kForward);
    } else {
      ++scatters;
      EXPECT_EQ(op.op.kind, CollectiveKind::kReduceScatter);
      EXPECT_FALSE(op.op.blocking);
    }
  }
  EXPECT_EQ(gathers, 32);
  EXPECT_EQ(scatters, 32);
  EXPECT_DOUBLE_EQ(gathered, 2.0 * static_cast<double>(ParamCount(w.arch)));
}

TEST(FsdpOpsTest, ZeroThreeAddsBackwardGathers) {
  const ClusterTopology t(Preset(Generation::kH100), 2);
  ParallelismConfig c = Config(16, 1, 1, 1);
  c.sharding = ShardingMode::kZero3;
  const auto ops = FsdpOps(Llama7b(16), c, t);
  const auto backward_gathers =
      std::count_if(ops.begin(), ops.end(), [](const LayerOp& op) {
        return op.op.kind == CollectiveKind::kAllGather &&
               op.pass == Pass::kBackward;
      });
  EXPECT_EQ(backward_gathers, 32);
  EXPECT_EQ(ops.size(), 96u);
}

TEST(FsdpOpsTest, UnitsShardAcrossModelParallelGroups) {
  const TrainingWorkload w = Llama7b(16);
  const auto full = FsdpUnitBytes(w, Config(16, 1, 1, 1));
  const auto sharded = FsdpUnitBytes(w, Config(2, 2, 4, 8, 4));
  ASSERT_EQ(sharded.size(), 8u);
  double full_sum = 0.0;
  double sharded_sum = 0.0;
  for (double b : full) full_sum += b;
  for (double b : sharded) sharded_sum += b;
  // One stage of four holds a quarter of the layers and of the embedding.
  EXPECT_NEAR(sharded_sum * 2 * 4, full_sum, full_sum * 1e-12);
  EXPECT_DOUBLE_EQ(sharded[1], full[1] / 2);
}

TEST(TpOpsTest, SingleDeviceTensorParallelIsEmpty) {
  const ClusterTopology t(Preset(Generation::kH100), 1);
  EXPECT_TRUE(TpOps(Llama7b(8), Config(8, 1, 1, 1), t).empty());
}

TEST(TpOpsTest, FourAllReducesPerLayerIntraNode) {
  const ClusterTopology t(Preset(Generation::kH100), 1);
  const TrainingWorkload w = Llama7b(2);
  const auto ops = TpOps(w, Config(1, 8, 1, 2), t);
  EXPECT_EQ(ops.size(), 4u * 32);
  for (const LayerOp& op : ops) {
    EXPECT_EQ(op.op.kind, CollectiveKind::kAllReduce);
    EXPECT_EQ(op.op.span, Span::kIntraNode);
    EXPECT_TRUE(op.op.blocking);
    EXPECT_DOUBLE_EQ(op.op.payload_bytes, 2.0 * 4096 * 4096 * 2);
  }
}

TEST(TpOpsTest, SixteenWaySpansNodes) {
  const ClusterTopology t(Preset(Generation::kH100), 2);
  const auto ops = TpOps(Llama7b(1), Config(1, 16, 1, 1), t);
  ASSERT_FALSE(ops.empty());
  EXPECT_EQ(ops.front().op.span, Span::kCrossNode);
}

TEST(TpOpsTest, MicrobatchesSplitPayload) {
  const ClusterTopology t(Preset(Generation::kH100), 1);
  const auto ops = TpOps(Llama7b(8), Config(1, 2, 4, 8, 4), t);
  EXPECT_EQ(ops.size(), 2u * 4 * 2 * 8);
  EXPECT_DOUBLE_EQ(ops.front().op.payload_bytes,
                   BoundaryActivationBytes(Llama7b(8), 2.0));
}

TEST(BubbleTest, Values) {
  EXPECT_EQ(BubbleFraction(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(BubbleFraction(4, 4), 3.0 / 7.0);
  EXPECT_NEAR(BubbleFraction(4, 4), 0.4286, 1e-4);
  EXPECT_THROW(BubbleFraction(4, 3), ConfigError);
}

TEST(BubbleTest, VanishesWithManyMicrobatches) {
  double prev = 1.0;
  for (int m = 4; m <= 4096; m *= 2) {
    const double b = BubbleFraction(4, m);
    EXPECT_LT(b, prev);
    prev = b;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(PipelinePlanTest, TwoSendsPerMicrobatchAndBoundary) {
  const ClusterTopology t(Preset(Generation::kH100), 1);
  const TrainingWorkload w = Llama7b(8);
  const PipelinePlan plan = PipelineSchedulePlan(w, Config(2, 1, 4, 4, 4), t);
  EXPECT_DOUBLE_EQ(plan.bubble_fraction, 3.0 / 7.0);
  EXPECT_EQ(plan.ops.size(), 2u * 4 * 3);
  for (const CommOp& op : plan.ops) {
    EXPECT_EQ(op.kind, CollectiveKind::kPointToPoint);
    EXPECT_EQ(op.group_size, 2);
  }
  const PipelinePlan none = PipelineSchedulePlan(w, Config(8, 1, 1, 1), t);
  EXPECT_EQ(none.bubble_fraction, 0.0);
  EXPECT_TRUE(none.ops.empty());
}

}  // namespace
}  // namespace shardsim
