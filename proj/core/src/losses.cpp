// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/losses.hpp"

#include <algorithm>
#include <cmath>

#include "forgeloc/labels.hpp"

namespace forgeloc {
namespace {

void CheckBatch(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ShapeError(std::string(what) + ": batch sizes differ");
  if (a == 0) throw ShapeError(std::string(what) + ": empty batch");
}

double ClampProbability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

// Accumulates sum_i H(p_i, y_i) over one sequence and writes d(-H)/dp,
// scaled by `scale`, into `grad`.
double CrossEntropy(const FrameLabelSequence& pred,
                    const FrameLabelSequence& target, double scale,
                    Matrix* grad) {
  const int T = pred.frames();
  *grad = Matrix::Zero(T, 1);
  double sum = 0.0;
  for (int t = 0; t < T; ++t) {
    const double p = ClampProbability(pred[t]);
    const double y = target[t];
    sum -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    if (pred[t] > kProbabilityClamp && pred[t] < 1.0 - kProbabilityClamp) {
      (*grad)(t, 0) = scale * (-y / p + (1.0 - y) / (1.0 - p));
    }
  }
  return sum;
}

double SquaredError(const BoundaryMap& pred, const BoundaryMap& target,
                    double scale, Matrix* grad) {
  if (pred.max_duration() != target.max_duration() ||
      pred.frames() != target.frames()) {
    throw ShapeError("boundary map shapes differ");
  }
  const Matrix diff = pred.values() - target.values();
  *grad = (2.0 * scale) * diff;
  return diff.squaredNorm();
}

}  // namespace

void LossWeights::Check() const {
  for (double v : {lambda_c, lambda_f, lambda_b, lambda_bm}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error("loss weights must be finite and nonnegative");
    }
  }
  if (!std::isfinite(delta) || !(delta > 0.0)) {
    throw Error("contrastive margin must be > 0");
  }
}

int PairLabel(const VideoAnnotation& ann) { return ann.is_fake() ? 0 : 1; }

LossReport ContrastiveLoss(std::span<const FeatureSequence> f_v,
                           std::span<const FeatureSequence> f_a,
                           std::span<const int> pair_labels, double delta) {
  CheckBatch(f_v.size(), f_a.size(), "contrastive loss");
  CheckBatch(f_v.size(), pair_labels.size(), "contrastive loss");
  const int C = f_v[0].channels();
  const int T = f_v[0].frames();
  const double norm = 1.0 / (static_cast<double>(f_v.size()) * C * T);

  LossReport report;
  auto& gv = report.gradients[kGradFeaturesVideo];
  auto& ga = report.gradients[kGradFeaturesAudio];
  double sum = 0.0;
  for (std::size_t i = 0; i < f_v.size(); ++i) {
    if (f_v[i].channels() != C || f_v[i].frames() != T ||
        f_a[i].channels() != C || f_a[i].frames() != T) {
      throw ShapeError("contrastive loss: feature shapes differ");
    }
    const int y = pair_labels[i];
    if (y != 0 && y != 1) throw Error("contrastive pair label must be 0 or 1");
    const Matrix diff = f_v[i].data() - f_a[i].data();
    const double d = diff.norm();
    // dL/d(diff) = coef * diff
    double coef = 0.0;
    if (y == 1) {
      sum += d * d;
      coef = 2.0;
    } else {
      const double gap = delta - d;
      if (gap > 0.0) {
        sum += gap * gap;
        if (d > 0.0) coef = -2.0 * gap / d;
      }
    }
    gv.push_back((coef * norm) * diff);
    ga.push_back((-coef * norm) * diff);
  }
  report.value = norm * sum;
  return report;
}

LossReport FrameClassificationLoss(std::span<const FrameLabelSequence> pred_v,
                                   std::span<const FrameLabelSequence> pred_a,
                                   std::span<const FrameLabelSequence> target_v,
                                   std::span<const FrameLabelSequence> target_a) {
  CheckBatch(pred_v.size(), pred_a.size(), "frame loss");
  CheckBatch(pred_v.size(), target_v.size(), "frame loss");
  CheckBatch(pred_v.size(), target_a.size(), "frame loss");
  const int T = pred_v[0].frames();
  const double scale = 1.0 / (2.0 * static_cast<double>(pred_v.size()) * T);

  LossReport report;
  auto& gv = report.gradients[kGradFramesVideo];
  auto& ga = report.gradients[kGradFramesAudio];
  double sum = 0.0;
  for (std::size_t i = 0; i < pred_v.size(); ++i) {
    if (pred_v[i].frames() != T || pred_a[i].frames() != T ||
        target_v[i].frames() != T || target_a[i].frames() != T) {
      throw ShapeError("frame loss: sequence lengths differ");
    }
    Matrix g;
    sum += CrossEntropy(pred_v[i], target_v[i], scale, &g);
    gv.push_back(std::move(g));
    sum += CrossEntropy(pred_a[i], target_a[i], scale, &g);
    ga.push_back(std::move(g));
  }
  report.value = scale * sum;
  return report;
}

LossReport FrameClassificationLoss(std::span<const FrameLabelSequence> pred_v,
                                   std::span<const FrameLabelSequence> pred_a,
                                   std::span<const VideoAnnotation> anns) {
  std::vector<FrameLabelSequence> tv, ta;
  tv.reserve(anns.size());
  ta.reserve(anns.size());
  for (const VideoAnnotation& a : anns) {
    tv.push_back(ModalityLabels(a, Modality::kVideo));
    ta.push_back(ModalityLabels(a, Modality::kAudio));
  }
  return FrameClassificationLoss(pred_v, pred_a, tv, ta);
}

LossReport BoundaryLoss(std::span<const BoundaryMap> pred,
                        std::span<const BoundaryMap> target) {
  CheckBatch(pred.size(), target.size(), "boundary loss");
  const double scale =
      1.0 / (static_cast<double>(pred.size()) * pred[0].max_duration() *
             pred[0].frames());
  LossReport report;
  auto& g = report.gradients[kGradFusedMap];
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].max_duration() != pred[0].max_duration() ||
        pred[i].frames() != pred[0].frames()) {
      throw ShapeError("boundary loss: map shapes differ across the batch");
    }
    Matrix gi;
    sum += SquaredError(pred[i], target[i], scale, &gi);
    g.push_back(std::move(gi));
  }
  report.value = scale * sum;
  return report;
}

LossReport ModalityBoundaryLoss(std::span<const BoundaryMap> pred_v,
                                std::span<const BoundaryMap> pred_a,
                                std::span<const BoundaryMap> target_v,
                                std::span<const BoundaryMap> target_a) {
  CheckBatch(pred_v.size(), pred_a.size(), "modality boundary loss");
  CheckBatch(pred_v.size(), target_v.size(), "modality boundary loss");
  CheckBatch(pred_v.size(), target_a.size(), "modality boundary loss");
  const int D = pred_v[0].max_duration();
  const int T = pred_v[0].frames();
  const double scale = 1.0 / (2.0 * static_cast<double>(pred_v.size()) * D * T);
  LossReport report;
  auto& gv = report.gradients[kGradMapVideo];
  auto& ga = report.gradients[kGradMapAudio];
  double sum = 0.0;
  for (std::size_t i = 0; i < pred_v.size(); ++i) {
    if (pred_v[i].max_duration() != D || pred_v[i].frames() != T) {
      throw ShapeError("modality boundary loss: map shapes differ");
    }
    Matrix g;
    sum += SquaredError(pred_v[i], target_v[i], scale, &g);
    gv.push_back(std::move(g));
    sum += SquaredError(pred_a[i], target_a[i], scale, &g);
    ga.push_back(std::move(g));
  }
  report.value = scale * sum;
  return report;
}

LossReport ModalityBoundaryLoss(std::span<const BoundaryMap> pred_v,
                                std::span<const BoundaryMap> pred_a,
                                std::span<const VideoAnnotation> anns,
                                std::span<const BoundaryMap> gt) {
  CheckBatch(anns.size(), gt.size(), "modality boundary loss");
  std::vector<BoundaryMap> tv, ta;
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const BoundaryMap zero(gt[i].max_duration(), gt[i].frames());
    tv.push_back(anns[i].eta_v ? gt[i] : zero);
    ta.push_back(anns[i].eta_a ? gt[i] : zero);
  }
  return ModalityBoundaryLoss(pred_v, pred_a, tv, ta);
}

LossReport TotalLoss(const LossComponents& c, const LossWeights& w) {
  LossReport total;
  const std::pair<const LossReport*, double> parts[] = {
      {&c.contrastive, w.lambda_c},
      {&c.frame, w.lambda_f},
      {&c.boundary, w.lambda_b},
      {&c.modality_boundary, w.lambda_bm}};
  for (const auto& [report, weight] : parts) {
    total.value += weight * report->value;
    for (const auto& [name, grads] : report->gradients) {
      auto& dst = total.gradients[name];
      if (dst.empty()) {
        for (const Matrix& g : grads) dst.push_back(weight * g);
      } else {
        if (dst.size() != grads.size()) {
          throw ShapeError("total loss: gradient batch sizes differ");
        }
        for (std::size_t i = 0; i < grads.size(); ++i) dst[i] += weight * grads[i];
      }
    }
  }
  return total;
}

}  // namespace forgeloc
