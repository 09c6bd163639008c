// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

// Deliberately naive reference implementations used to cross-check the
// library. None of them call into forgeloc beyond plain data types.

#ifndef FORGELOC_TESTS_ORACLES_HPP_
#define FORGELOC_TESTS_ORACLES_HPP_

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "forgeloc/manifest.hpp"
#include "forgeloc/planner.hpp"
#include "forgeloc/postprocess.hpp"

namespace forgeloc::oracle {

double Iou(double s0, double e0, double s1, double e1);

/// D x T grid of max IoU against frame-unit segments, -1 on invalid cells.
std::vector<std::vector<double>> GtGrid(const std::vector<Segment>& gts_frames,
                                        int frames, int max_duration);

/// Precision at every rank, then AP = sum over true positives of the best
/// precision at that rank or later, divided by the number of ground truths.
double AveragePrecision(const std::vector<Prediction>& preds,
                        const Manifest& manifest, double iou_threshold);

/// Recall of the top `budget` predictions per video averaged over IoU
/// thresholds 0.50, 0.55, ..., 0.95.
double AverageRecall(const std::vector<Prediction>& preds,
                     const Manifest& manifest, int budget);

/// Pairwise-comparison AUC (ties count one half).
double Auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Textbook Soft-NMS: pick the highest score, decay the rest, drop anything
/// under the floor; the first `top_k` picks are returned.
std::vector<Segment> SoftNms(std::vector<Segment> boxes,
                             const SoftNmsConfig& config);

struct PlanChoice {
  std::vector<int> tokens;            // ascending
  std::vector<std::string> antonyms;  // parallel to tokens
  double delta = 0.0;                 // S(D') - S(D), full rescoring
};

/// Enumerates every set of distinct tokens up to the budget and every
/// antonym assignment, rescoring the whole transcript each time. Returns an
/// empty choice when nothing changes the score.
PlanChoice BestPlan(const Transcript& t, const Lexicon& lexicon,
                    const AntonymDictionary& antonyms);

/// Random manifest of `n_videos` videos (ids "v0", "v1", ...) with up to
/// `max_gt` segments each, at least one segment overall.
Manifest RandomManifest(std::mt19937_64& rng, int n_videos, int max_gt);

/// Random predictions for videos of `manifest` (plus occasional unknown ids
/// when `unknown_ids`), some jittered copies of ground truth.
std::vector<Prediction> RandomPredictions(std::mt19937_64& rng,
                                          const Manifest& manifest,
                                          int max_preds, bool unknown_ids);

}  // namespace forgeloc::oracle

#endif  // FORGELOC_TESTS_ORACLES_HPP_
