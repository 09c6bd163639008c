// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_EVALUATION_HPP_
#define FORGELOC_EVALUATION_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forgeloc/manifest.hpp"
#include "forgeloc/postprocess.hpp"
#include "forgeloc/types.hpp"

namespace forgeloc {

inline constexpr double kApThresholds[] = {0.5, 0.75, 0.95};
inline constexpr int kArBudgets[] = {100, 50, 20, 10};

/// The ten recall IoU thresholds 0.50, 0.55, ..., 0.95 (computed as k/100).
std::vector<double> RecallThresholds();

/// For each prediction (already sorted by descending score), the index of
/// the ground-truth segment it matches, or -1. A prediction takes the
/// highest-IoU unmatched ground truth with IoU >= iou_threshold (lowest
/// index on IoU ties); each ground truth is matched at most once.
std::vector<int> MatchGreedy(std::span<const Segment> preds,
                             std::span<const Segment> gts,
                             double iou_threshold);

/// Predictions pooled across all manifest videos into one ranking (stable
/// sort by score, ties keep input order), cumulative TP/FP, and the area
/// under the monotone precision envelope. Predictions for videos outside
/// the manifest are ignored. Throws if the manifest has no fake segments.
double AveragePrecision(const std::vector<Prediction>& preds,
                        const Manifest& manifest, double iou_threshold);

using PredictionsByVideo = std::map<std::string, std::vector<Segment>>;

PredictionsByVideo GroupByVideo(const std::vector<Prediction>& preds);

/// Mean over RecallThresholds() of (matched GT / total GT) when each video
/// keeps only its `budget` highest-scoring predictions. Throws if the
/// manifest has no fake segments.
double AverageRecall(const PredictionsByVideo& preds, const Manifest& manifest,
                     int budget);

/// Highest prediction score, 0 when there are none.
double VideoScore(std::span<const Segment> preds);

/// ROC AUC as P(fake score > real score), ties counting one half.
/// `is_fake` holds 1 for fake and 0 for real. Throws unless both classes
/// are present.
double Auc(std::span<const double> scores, std::span<const int> is_fake);

struct EvalReport {
  std::map<double, double> ap;  // IoU threshold -> AP
  std::map<int, double> ar;     // budget -> AR
  std::optional<double> auc;    // absent when only one class is present
  int videos = 0;
  int gt_segments = 0;
  int predictions = 0;
};

/// AP at kApThresholds, AR at kArBudgets and the max-confidence AUC.
EvalReport Evaluate(const Manifest& manifest,
                    const std::vector<Prediction>& preds);

/// {"ap": {"0.5": ..}, "ar": {"100": ..}, "auc": .., "counts": {..}}
std::string EvalReportToJson(const EvalReport& report);

}  // namespace forgeloc

#endif  // FORGELOC_EVALUATION_HPP_
