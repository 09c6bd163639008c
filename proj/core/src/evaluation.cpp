// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "forgeloc/labels.hpp"
#include "json.hpp"

namespace forgeloc {
namespace {

int CountGt(const Manifest& manifest) {
  int n = 0;
  for (const VideoAnnotation& a : manifest) {
    n += static_cast<int>(a.fake_segments.size());
  }
  return n;
}

// Index of the best unmatched ground truth for `pred`, or -1.
int BestUnmatched(const Segment& pred, std::span<const Segment> gts,
                  const std::vector<char>& used, double iou_threshold) {
  int best = -1;
  double best_iou = -1.0;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (used[g]) continue;
    const double iou = Iou1d(pred, gts[g]);
    if (iou >= iou_threshold && iou > best_iou) {
      best = static_cast<int>(g);
      best_iou = iou;
    }
  }
  return best;
}

std::vector<std::size_t> RankByScore(std::span<const Segment> segs) {
  std::vector<std::size_t> order(segs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return segs[a].score > segs[b].score;
  });
  return order;
}

std::string ThresholdKey(double thr) {
  std::ostringstream s;
  s << thr;
  return s.str();
}

}  // namespace

std::vector<double> RecallThresholds() {
  std::vector<double> thr;
  for (int k = 50; k <= 95; k += 5) thr.push_back(k / 100.0);
  return thr;
}

std::vector<int> MatchGreedy(std::span<const Segment> preds,
                             std::span<const Segment> gts,
                             double iou_threshold) {
  std::vector<char> used(gts.size(), 0);
  std::vector<int> match(preds.size(), -1);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int g = BestUnmatched(preds[i], gts, used, iou_threshold);
    if (g >= 0) {
      used[static_cast<std::size_t>(g)] = 1;
      match[i] = g;
    }
  }
  return match;
}

double AveragePrecision(const std::vector<Prediction>& preds,
                        const Manifest& manifest, double iou_threshold) {
  const int n_gt = CountGt(manifest);
  if (n_gt == 0) throw Error("average precision undefined: no ground-truth segments");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < manifest.size(); ++i) index[manifest[i].video_id] = i;

  std::vector<std::size_t> order;
  std::vector<Segment> segs;
  std::vector<std::size_t> video_of;
  for (const Prediction& p : preds) {
    auto it = index.find(p.video_id);
    if (it == index.end()) continue;
    segs.push_back(p.segment);
    video_of.push_back(it->second);
  }
  order = RankByScore(segs);

  std::vector<std::vector<char>> used(manifest.size());
  for (std::size_t v = 0; v < manifest.size(); ++v) {
    used[v].assign(manifest[v].fake_segments.size(), 0);
  }
  std::vector<double> precision, recall;
  precision.reserve(order.size());
  recall.reserve(order.size());
  int tp = 0, fp = 0;
  for (std::size_t i : order) {
    const std::size_t v = video_of[i];
    const int g = BestUnmatched(segs[i], manifest[v].fake_segments, used[v],
                                iou_threshold);
    if (g >= 0) {
      used[v][static_cast<std::size_t>(g)] = 1;
      ++tp;
    } else {
      ++fp;
    }
    precision.push_back(static_cast<double>(tp) / (tp + fp));
    recall.push_back(static_cast<double>(tp) / n_gt);
  }

  // All-point interpolation over the monotone precision envelope.
  std::vector<double> mprec(precision.size() + 2, 0.0);
  std::vector<double> mrec(recall.size() + 2, 0.0);
  std::copy(precision.begin(), precision.end(), mprec.begin() + 1);
  std::copy(recall.begin(), recall.end(), mrec.begin() + 1);
  mrec.back() = 1.0;
  for (std::size_t i = mprec.size() - 1; i-- > 0;) {
    mprec[i] = std::max(mprec[i], mprec[i + 1]);
  }
  double ap = 0.0;
  for (std::size_t i = 1; i < mrec.size(); ++i) {
    if (mrec[i] != mrec[i - 1]) ap += (mrec[i] - mrec[i - 1]) * mprec[i];
  }
  return ap;
}

PredictionsByVideo GroupByVideo(const std::vector<Prediction>& preds) {
  PredictionsByVideo out;
  for (const Prediction& p : preds) out[p.video_id].push_back(p.segment);
  return out;
}

double AverageRecall(const PredictionsByVideo& preds, const Manifest& manifest,
                     int budget) {
  const int n_gt = CountGt(manifest);
  if (n_gt == 0) throw Error("average recall undefined: no ground-truth segments");
  if (budget < 0) throw Error("proposal budget must be nonnegative");

  // Top-N per video, computed once.
  std::vector<std::vector<Segment>> top(manifest.size());
  for (std::size_t v = 0; v < manifest.size(); ++v) {
    auto it = preds.find(manifest[v].video_id);
    if (it == preds.end()) continue;
    const std::vector<std::size_t> order = RankByScore(it->second);
    const std::size_t keep = std::min(order.size(), static_cast<std::size_t>(budget));
    for (std::size_t k = 0; k < keep; ++k) top[v].push_back(it->second[order[k]]);
  }

  const std::vector<double> thresholds = RecallThresholds();
  double sum = 0.0;
  for (double thr : thresholds) {
    int matched = 0;
    for (std::size_t v = 0; v < manifest.size(); ++v) {
      if (manifest[v].fake_segments.empty()) continue;
      for (int g : MatchGreedy(top[v], manifest[v].fake_segments, thr)) {
        if (g >= 0) ++matched;
      }
    }
    sum += static_cast<double>(matched) / n_gt;
  }
  return sum / static_cast<double>(thresholds.size());
}

double VideoScore(std::span<const Segment> preds) {
  double best = 0.0;
  for (const Segment& s : preds) best = std::max(best, s.score);
  return best;
}

double Auc(std::span<const double> scores, std::span<const int> is_fake) {
  if (scores.size() != is_fake.size()) throw ShapeError("auc: size mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U with mid-ranks for ties.
  double rank_sum_fake = 0.0;
  std::size_t n_fake = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (is_fake[order[k]]) {
        rank_sum_fake += mid_rank;
        ++n_fake;
      }
    }
    i = j;
  }
  const std::size_t n_real = n - n_fake;
  if (n_fake == 0 || n_real == 0) {
    throw Error("auc undefined: need at least one real and one fake video");
  }
  const double nf = static_cast<double>(n_fake);
  return (rank_sum_fake - nf * (nf + 1.0) / 2.0) /
         (nf * static_cast<double>(n_real));
}

EvalReport Evaluate(const Manifest& manifest,
                    const std::vector<Prediction>& preds) {
  EvalReport r;
  r.videos = static_cast<int>(manifest.size());
  r.gt_segments = CountGt(manifest);
  std::vector<Prediction> kept;
  for (const Prediction& p : preds) {
    if (FindVideo(manifest, p.video_id)) kept.push_back(p);
  }
  r.predictions = static_cast<int>(kept.size());
  for (double thr : kApThresholds) r.ap[thr] = AveragePrecision(kept, manifest, thr);
  const PredictionsByVideo grouped = GroupByVideo(kept);
  for (int n : kArBudgets) r.ar[n] = AverageRecall(grouped, manifest, n);

  std::vector<double> scores;
  std::vector<int> labels;
  bool any_real = false, any_fake = false;
  for (const VideoAnnotation& a : manifest) {
    auto it = grouped.find(a.video_id);
    scores.push_back(it == grouped.end() ? 0.0 : VideoScore(it->second));
    labels.push_back(a.is_fake() ? 1 : 0);
    (a.is_fake() ? any_fake : any_real) = true;
  }
  if (any_real && any_fake) r.auc = Auc(scores, labels);
  return r;
}

std::string EvalReportToJson(const EvalReport& report) {
  nlohmann::json j;
  j["ap"] = nlohmann::json::object();
  for (const auto& [thr, v] : report.ap) j["ap"][ThresholdKey(thr)] = v;
  j["ar"] = nlohmann::json::object();
  for (const auto& [n, v] : report.ar) j["ar"][std::to_string(n)] = v;
  j["auc"] = report.auc ? nlohmann::json(*report.auc) : nlohmann::json(nullptr);
  j["counts"] = {{"videos", report.videos},
                 {"gt_segments", report.gt_segments},
                 {"predictions", report.predictions}};
  return j.dump(2);
}

}  // namespace forgeloc
