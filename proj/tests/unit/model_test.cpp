// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "forgeloc/fusion.hpp"
#include "forgeloc/model.hpp"

namespace forgeloc {
namespace {

ModelConfig SmallConfig() {
  ModelConfig c;
  c.video.feature_dim = c.audio.feature_dim = 4;
  c.video.input_descriptor_dim = 5;
  c.audio.input_descriptor_dim = 3;
  c.max_duration = 4;
  return c;
}

VideoInput RandomInput(int frames, int ratio, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  VideoInput in;
  in.descriptors.resize(5, frames);
  in.spectrogram.resize(frames * ratio, 3);
  for (Eigen::Index i = 0; i < in.descriptors.size(); ++i) in.descriptors(i) = n(rng);
  for (Eigen::Index i = 0; i < in.spectrogram.size(); ++i) in.spectrogram(i) = n(rng);
  return in;
}

TEST(ModelConfigTest, Validation) {
  ModelConfig c = SmallConfig();
  EXPECT_NO_THROW(c.Check());
  c.audio.feature_dim = 3;
  EXPECT_THROW(c.Check(), Error);
  c = SmallConfig();
  c.video.temporal_kernel = 2;
  EXPECT_THROW(c.Check(), Error);
}

TEST(ModelTest, InitIsSeeded) {
  const ModelParams a = InitParams(SmallConfig(), 7);
  const ModelParams b = InitParams(SmallConfig(), 7);
  const ModelParams c = InitParams(SmallConfig(), 8);
  ASSERT_EQ(a.arrays.size(), b.arrays.size());
  bool differs = false;
  auto ib = b.arrays.begin();
  auto ic = c.arrays.begin();
  for (auto ia = a.arrays.begin(); ia != a.arrays.end(); ++ia, ++ib, ++ic) {
    EXPECT_EQ(ia->first, ib->first);
    EXPECT_EQ(ia->second, ib->second);
    if (ia->second != ic->second) differs = true;
  }
  EXPECT_TRUE(differs);
}

TEST(ModelTest, ForwardShapesAndRanges) {
  const ModelParams p = InitParams(SmallConfig(), 1);
  const VideoInput in = RandomInput(12, 3, 2);
  const ForwardTrace tr = Forward(p, in);
  EXPECT_EQ(tr.f_v.channels(), 4);
  EXPECT_EQ(tr.f_v.frames(), 12);
  EXPECT_EQ(tr.f_a.frames(), 12);
  EXPECT_EQ(tr.y_v.frames(), 12);
  EXPECT_EQ(tr.fused.max_duration(), 4);
  EXPECT_EQ(tr.fused.frames(), 12);
  for (int d = 0; d < 4; ++d) {
    for (int t = 0; t < 12; ++t) {
      if (!tr.fused.valid(d, t)) {
        EXPECT_EQ(tr.fused(d, t), 0.0);
        continue;
      }
      EXPECT_GT(tr.fused(d, t), 0.0);
      EXPECT_LT(tr.fused(d, t), 1.0);
      // The fused value lies between the two modality values.
      const double lo = std::min(tr.m_v(d, t), tr.m_a(d, t));
      const double hi = std::max(tr.m_v(d, t), tr.m_a(d, t));
      EXPECT_GE(tr.fused(d, t), lo - 1e-12);
      EXPECT_LE(tr.fused(d, t), hi + 1e-12);
    }
  }
  EXPECT_EQ(Infer(p, in).values(), tr.fused.values());
}

TEST(ModelTest, AudioNeedsEnoughFrames) {
  const ModelParams p = InitParams(SmallConfig(), 1);
  VideoInput in = RandomInput(8, 1, 3);
  in.spectrogram.conservativeResize(6, Eigen::NoChange);
  EXPECT_THROW(Forward(p, in), Error);
}

TEST(ModelTest, RejectsWrongDescriptorWidth) {
  const ModelParams p = InitParams(SmallConfig(), 1);
  VideoInput in = RandomInput(8, 2, 3);
  in.descriptors.conservativeResize(4, Eigen::NoChange);
  EXPECT_THROW(Forward(p, in), ShapeError);
}

TEST(CheckpointTest, RoundTripIsExact) {
  ModelParams p = InitParams(SmallConfig(), 5);
  p.arrays[kFusionBiasVideo](0, 0) = 0.1 + 1e-17;
  std::stringstream io;
  SaveCheckpoint(io, p);
  const ModelParams q = LoadCheckpoint(io);
  EXPECT_EQ(q.config.max_duration, 4);
  EXPECT_EQ(q.config.audio.input_descriptor_dim, 3);
  EXPECT_EQ(q.seed, 5u);
  const VideoInput in = RandomInput(10, 2, 6);
  EXPECT_EQ(Infer(p, in).values(), Infer(q, in).values());
}

TEST(CheckpointTest, RejectsMissingArray) {
  std::stringstream io("{\"config\": {}}");
  EXPECT_THROW(LoadCheckpoint(io), Error);
}

TEST(FusionTest, WeightedAverage) {
  BoundaryMap mv(1, 2), ma(1, 2);
  mv.set(0, 0, 0.2);
  ma.set(0, 0, 0.8);
  mv.set(0, 1, 0.4);
  ma.set(0, 1, 0.6);
  FusionWeights w{Matrix::Constant(1, 2, 3.0), Matrix::Constant(1, 2, 1.0)};
  w.w_v(0, 1) = 0.0;
  w.w_a(0, 1) = 0.0;
  const BoundaryMap f = Fuse(mv, ma, w);
  EXPECT_NEAR(f(0, 0), (3 * 0.2 + 0.8) / 4.0, 1e-15);
  EXPECT_NEAR(f(0, 1), 0.5, 1e-15);  // both weights vanish: plain mean
}

TEST(FusionTest, ShapeMismatchThrows) {
  const BoundaryMap mv(2, 3), ma(2, 4);
  const FusionWeights w{Matrix::Ones(2, 3), Matrix::Ones(2, 3)};
  EXPECT_THROW(Fuse(mv, ma, w), ShapeError);
}

TEST(FusionTest, ProducedWeightsArePositive) {
  const ModelParams p = InitParams(SmallConfig(), 9);
  const ForwardTrace tr = Forward(p, RandomInput(9, 2, 10));
  for (int d = 0; d < 4; ++d) {
    for (int t = 0; t + d + 1 <= 9; ++t) {
      EXPECT_GT(tr.fusion.weights.w_v(d, t), 0.0);
      EXPECT_GT(tr.fusion.weights.w_a(d, t), 0.0);
    }
  }
  const FusionWeights w = ProduceWeights(tr.m_v, tr.m_a, tr.f_v, tr.f_a, p.arrays);
  EXPECT_EQ(w.w_v, tr.fusion.weights.w_v);
}

}  // namespace
}  // namespace forgeloc
