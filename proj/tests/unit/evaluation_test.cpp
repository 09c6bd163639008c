// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "forgeloc/evaluation.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace forgeloc {
namespace {

VideoAnnotation Video(const std::string& id, std::vector<Segment> gts) {
  VideoAnnotation a;
  a.video_id = id;
  a.fps = 25.0;
  a.duration = 10.0;
  a.n_frames = 250;
  a.eta_v = a.eta_a = !gts.empty();
  a.fake_segments = std::move(gts);
  return a;
}

TEST(MatchGreedyTest, PrefersHighestIouThenLowestIndex) {
  const std::vector<Segment> gts = {{0, 2, 1}, {0, 2, 1}, {1, 3, 1}};
  const std::vector<Segment> preds = {{0, 2, 0.9}, {0, 2, 0.8}, {0, 2, 0.7}, {5, 6, 0.6}};
  EXPECT_EQ(MatchGreedy(preds, gts, 0.3), (std::vector<int>{0, 1, 2, -1}));
  EXPECT_EQ(MatchGreedy(preds, gts, 0.5), (std::vector<int>{0, 1, -1, -1}));
}

TEST(AveragePrecisionTest, HandComputed) {
  const Manifest m = {Video("a", {{0, 1, 1}, {4, 5, 1}}), Video("b", {})};
  // Ranked: TP, FP, TP -> precisions 1, 1/2, 2/3; AP = (1 + 2/3) / 2.
  const std::vector<Prediction> p = {
      {"a", {0, 1, 0.9}}, {"b", {0, 1, 0.8}}, {"a", {4, 5, 0.7}}};
  EXPECT_NEAR(AveragePrecision(p, m, 0.5), (1.0 + 2.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(AveragePrecision({}, m, 0.5), 0.0);
}

TEST(AveragePrecisionTest, DuplicatesCountAsFalsePositives) {
  const Manifest m = {Video("a", {{0, 1, 1}})};
  const std::vector<Prediction> p = {{"a", {0, 1, 0.9}}, {"a", {0, 1, 0.8}}};
  EXPECT_DOUBLE_EQ(AveragePrecision(p, m, 0.5), 1.0);
  const std::vector<Prediction> q = {{"a", {3, 4, 0.9}}, {"a", {0, 1, 0.8}}};
  EXPECT_DOUBLE_EQ(AveragePrecision(q, m, 0.5), 0.5);
}

TEST(AveragePrecisionTest, UndefinedWithoutGroundTruth) {
  EXPECT_THROW(AveragePrecision({}, {Video("a", {})}, 0.5), Error);
}

TEST(AverageRecallTest, BudgetLimitsPerVideo) {
  const Manifest m = {Video("a", {{0, 1, 1}, {4, 5, 1}})};
  const std::vector<Prediction> p = {{"a", {0, 1, 0.9}}, {"a", {4, 5, 0.5}}};
  EXPECT_DOUBLE_EQ(AverageRecall(GroupByVideo(p), m, 1), 0.5);
  EXPECT_DOUBLE_EQ(AverageRecall(GroupByVideo(p), m, 2), 1.0);
  EXPECT_DOUBLE_EQ(AverageRecall(GroupByVideo(p), m, 0), 0.0);
  EXPECT_THROW(AverageRecall(GroupByVideo(p), m, -1), Error);
}

TEST(AverageRecallTest, AveragesOverThresholds) {
  const Manifest m = {Video("a", {{0, 1, 1}})};
  // IoU 0.8 passes thresholds 0.50 .. 0.80: seven of ten.
  const std::vector<Prediction> p = {{"a", {0, 0.8, 0.9}}};
  EXPECT_NEAR(AverageRecall(GroupByVideo(p), m, 10), 0.7, 1e-15);
  EXPECT_EQ(RecallThresholds().size(), 10u);
}

TEST(AucTest, HandComputedWithTies) {
  const std::vector<double> s = {0.1, 0.4, 0.4, 0.8};
  const std::vector<int> y = {0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(Auc(s, y), (1.0 + 0.5 + 1.0 + 1.0) / 4.0);
  const std::vector<int> one = {1, 1, 1, 1};
  EXPECT_THROW(Auc(s, one), Error);
}

TEST(EvaluateTest, ReportAndJson) {
  const Manifest m = {Video("a", {{0, 1, 1}}), Video("b", {})};
  const std::vector<Prediction> p = {{"a", {0, 1, 0.9}}, {"b", {2, 3, 0.2}},
                                     {"zzz", {0, 1, 1.0}}};
  const EvalReport r = Evaluate(m, p);
  EXPECT_DOUBLE_EQ(r.ap.at(0.5), 1.0);
  EXPECT_DOUBLE_EQ(r.ar.at(100), 1.0);
  ASSERT_TRUE(r.auc.has_value());
  EXPECT_DOUBLE_EQ(*r.auc, 1.0);
  EXPECT_EQ(r.videos, 2);
  EXPECT_EQ(r.gt_segments, 1);
  EXPECT_EQ(r.predictions, 2);

  const auto j = nlohmann::json::parse(EvalReportToJson(r));
  EXPECT_DOUBLE_EQ(j.at("ap").at("0.75").get<double>(), 1.0);
  EXPECT_TRUE(j.at("ar").contains("10"));
  EXPECT_EQ(j.at("counts").at("predictions").get<int>(), 2);
}

TEST(EvaluateTest, AucAbsentWithOneClass) {
  const Manifest m = {Video("a", {{0, 1, 1}})};
  EXPECT_FALSE(Evaluate(m, {}).auc.has_value());
}

TEST(EvaluateTest, MatchesOracleOnRandomFixtures) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const Manifest m = oracle::RandomManifest(rng, 1 + trial % 5, 3);
    const std::vector<Prediction> p = oracle::RandomPredictions(rng, m, 10, true);
    for (double thr : kApThresholds) {
      EXPECT_NEAR(AveragePrecision(p, m, thr), oracle::AveragePrecision(p, m, thr), 1e-12);
    }
    for (int n : kArBudgets) {
      EXPECT_NEAR(AverageRecall(GroupByVideo(p), m, n), oracle::AverageRecall(p, m, n), 1e-12);
    }
  }
}

}  // namespace
}  // namespace forgeloc
