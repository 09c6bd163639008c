// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "forgeloc/gradcheck.hpp"
#include "forgeloc/losses.hpp"

namespace forgeloc {
namespace {

FeatureSequence Features(std::initializer_list<double> v) {
  Matrix m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(0, i++) = x;
  return FeatureSequence(m);
}

FrameLabelSequence Labels(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double y : v) x[i++] = y;
  return FrameLabelSequence(x);
}

TEST(ContrastiveLossTest, HandComputed) {
  // Real pair: squared distance 0.25 over C*T = 2 entries.
  const std::vector<FeatureSequence> fv = {Features({0.5, 0.0}), Features({0.0, 0.0})};
  const std::vector<FeatureSequence> fa = {Features({0.0, 0.0}), Features({0.6, 0.0})};
  const std::vector<int> labels = {1, 0};
  const LossReport r = ContrastiveLoss(fv, fa, labels, 0.99);
  // Fake pair: distance 0.6, hinge (0.99 - 0.6)^2.
  const double want = (0.25 + 0.39 * 0.39) / (2 * 1 * 2);
  EXPECT_NEAR(r.value, want, 1e-15);
}

TEST(ContrastiveLossTest, FakePairBeyondMarginIsFree) {
  const std::vector<FeatureSequence> fv = {Features({2.0})};
  const std::vector<FeatureSequence> fa = {Features({0.0})};
  const std::vector<int> labels = {0};
  const LossReport r = ContrastiveLoss(fv, fa, labels, 0.99);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.gradients.at(kGradFeaturesVideo)[0].norm(), 0.0);
}

TEST(ContrastiveLossTest, RejectsBadInput) {
  const std::vector<FeatureSequence> one = {Features({1.0})};
  const std::vector<FeatureSequence> two = {Features({1.0}), Features({1.0})};
  const std::vector<int> bad = {2};
  const std::vector<int> ok = {1};
  EXPECT_THROW(ContrastiveLoss(one, two, ok, 0.99), ShapeError);
  EXPECT_THROW(ContrastiveLoss(one, one, bad, 0.99), Error);
}

TEST(FrameLossTest, HandComputed) {
  const std::vector<FrameLabelSequence> pv = {Labels({0.8, 0.3})};
  const std::vector<FrameLabelSequence> pa = {Labels({0.5, 0.5})};
  const std::vector<FrameLabelSequence> tv = {Labels({1.0, 0.0})};
  const std::vector<FrameLabelSequence> ta = {Labels({0.0, 0.0})};
  const LossReport r = FrameClassificationLoss(pv, pa, tv, ta);
  const double want =
      (-std::log(0.8) - std::log(0.7) - 2.0 * std::log(0.5)) / (2.0 * 1 * 2);
  EXPECT_NEAR(r.value, want, 1e-15);
}

TEST(FrameLossTest, ClampsSaturatedPredictions) {
  const std::vector<FrameLabelSequence> p = {Labels({0.0, 1.0})};
  const std::vector<FrameLabelSequence> t = {Labels({1.0, 0.0})};
  const LossReport r = FrameClassificationLoss(p, p, t, t);
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_NEAR(r.value, -std::log(kProbabilityClamp), 1e-6);
}

TEST(BoundaryLossTest, MeanSquaredErrorOverGrid) {
  BoundaryMap pred(2, 3), target(2, 3);
  pred.set(0, 0, 0.5);
  target.set(1, 1, 1.0);
  const std::vector<BoundaryMap> p = {pred}, t = {target};
  EXPECT_NEAR(BoundaryLoss(p, t).value, (0.25 + 1.0) / 6.0, 1e-15);
}

TEST(ModalityBoundaryLossTest, UnmodifiedStreamTargetsZero) {
  VideoAnnotation a;
  a.eta_v = true;
  BoundaryMap gt(1, 2);
  gt.set(0, 0, 1.0);
  BoundaryMap pred(1, 2);
  pred.set(0, 0, 1.0);
  const std::vector<BoundaryMap> pv = {pred}, pa = {pred}, g = {gt};
  const std::vector<VideoAnnotation> anns = {a};
  // Video matches; audio should be zero but predicts 1 in one cell.
  EXPECT_NEAR(ModalityBoundaryLoss(pv, pa, anns, g).value, 1.0 / (2.0 * 2.0), 1e-15);
}

TEST(TotalLossTest, WeightsCombineValuesAndGradients) {
  LossComponents c;
  c.contrastive.value = 1.0;
  c.frame.value = 2.0;
  c.boundary.value = 3.0;
  c.modality_boundary.value = 4.0;
  c.boundary.gradients[kGradFusedMap] = {Matrix::Ones(1, 1)};
  c.modality_boundary.gradients[kGradMapVideo] = {Matrix::Ones(1, 1)};
  const LossWeights w;
  const LossReport t = TotalLoss(c, w);
  EXPECT_NEAR(t.value, 0.1 * 1 + 2.0 * 2 + 1.0 * 3 + 1.0 * 4, 1e-15);
  EXPECT_EQ(t.gradients.at(kGradFusedMap)[0](0, 0), 1.0);
}

TEST(LossWeightsTest, Validation) {
  LossWeights w;
  EXPECT_NO_THROW(w.Check());
  w.lambda_f = -1.0;
  EXPECT_THROW(w.Check(), Error);
  w = LossWeights{};
  w.delta = 0.0;
  EXPECT_THROW(w.Check(), Error);
}

TEST(GradientTest, ContrastiveFiniteDifference) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  std::vector<FeatureSequence> fv, fa;
  for (int i = 0; i < 2; ++i) {
    Matrix a(3, 4), b(3, 4);
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      a(k) = 0.2 * n(rng);
      b(k) = 0.2 * n(rng);
    }
    fv.emplace_back(a);
    fa.emplace_back(b);
  }
  const std::vector<int> labels = {1, 0};
  const LossReport r = ContrastiveLoss(fv, fa, labels, 0.99);
  for (std::size_t i = 0; i < 2; ++i) {
    Matrix x = fv[i].data();
    auto f = [&] {
      std::vector<FeatureSequence> v = fv;
      v[i] = FeatureSequence(x);
      return ContrastiveLoss(v, fa, labels, 0.99).value;
    };
    EXPECT_LT(MaxRelativeError(&x, r.gradients.at(kGradFeaturesVideo)[i], f, 1e-5), 1e-6);
  }
}

TEST(GradientTest, RelativeErrorFloor) {
  EXPECT_NEAR(RelativeError(1.0, 1.1), 0.1 / 1.1, 1e-15);
  EXPECT_DOUBLE_EQ(RelativeError(0.0, 1e-9), 1e-9 / 1e-6);
}

TEST(GradientTest, SuitePassesAtStatedTolerances) {
  GradCheckOptions o;
  o.instances = 5;
  for (const GradCheckResult& r : RunGradientSuite(o)) {
    EXPECT_TRUE(r.passed()) << r.name << " " << r.max_relative_error;
    EXPECT_EQ(r.instances, 5) << r.name;
  }
}

}  // namespace
}  // namespace forgeloc
