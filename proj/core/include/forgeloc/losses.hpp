// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_LOSSES_HPP_
#define FORGELOC_LOSSES_HPP_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "forgeloc/boundary_map.hpp"
#include "forgeloc/types.hpp"

namespace forgeloc {

struct LossWeights {
  double lambda_c = 0.1;
  double lambda_f = 2.0;
  double lambda_b = 1.0;
  double lambda_bm = 1.0;
  double delta = 0.99;  // contrastive margin

  void Check() const;
};

// Gradient keys. Each key maps to one matrix per batch sample with the same
// shape as the corresponding input (frame predictions are T x 1).
inline constexpr const char* kGradFeaturesVideo = "F_v";
inline constexpr const char* kGradFeaturesAudio = "F_a";
inline constexpr const char* kGradFramesVideo = "Y_v";
inline constexpr const char* kGradFramesAudio = "Y_a";
inline constexpr const char* kGradFusedMap = "M";
inline constexpr const char* kGradMapVideo = "M_v";
inline constexpr const char* kGradMapAudio = "M_a";

struct LossReport {
  double value = 0.0;
  std::map<std::string, std::vector<Matrix>> gradients;
};

/// 1 for a real video (matching audio/visual pair), 0 when at least one
/// modality was modified.
int PairLabel(const VideoAnnotation& ann);

/// Margin contrastive loss over whole-sample Frobenius distances
/// d_i = ||F_v,i - F_a,i||, normalized by N * C_f * T:
///   y d^2 + (1 - y) max(delta - d, 0)^2.
/// The subgradient is 0 at d = 0 and at d = delta.
LossReport ContrastiveLoss(std::span<const FeatureSequence> f_v,
                           std::span<const FeatureSequence> f_a,
                           std::span<const int> pair_labels, double delta);

/// Predictions are clamped to [kProbabilityClamp, 1 - kProbabilityClamp]
/// before the log; the gradient is 0 where the clamp is active.
inline constexpr double kProbabilityClamp = 1e-7;

/// Mean binary cross-entropy over both modalities, all samples and frames.
LossReport FrameClassificationLoss(std::span<const FrameLabelSequence> pred_v,
                                   std::span<const FrameLabelSequence> pred_a,
                                   std::span<const FrameLabelSequence> target_v,
                                   std::span<const FrameLabelSequence> target_a);

/// Same, with targets built from the annotations via ModalityLabels.
LossReport FrameClassificationLoss(std::span<const FrameLabelSequence> pred_v,
                                   std::span<const FrameLabelSequence> pred_a,
                                   std::span<const VideoAnnotation> anns);

/// Mean squared error over all N * D * T cells of the fused map.
LossReport BoundaryLoss(std::span<const BoundaryMap> pred,
                        std::span<const BoundaryMap> target);

/// Mean squared error averaged over both modality maps (1 / 2NDT).
LossReport ModalityBoundaryLoss(std::span<const BoundaryMap> pred_v,
                                std::span<const BoundaryMap> pred_a,
                                std::span<const BoundaryMap> target_v,
                                std::span<const BoundaryMap> target_a);

/// Targets are the fused ground truth `gt` masked by each modality flag.
LossReport ModalityBoundaryLoss(std::span<const BoundaryMap> pred_v,
                                std::span<const BoundaryMap> pred_a,
                                std::span<const VideoAnnotation> anns,
                                std::span<const BoundaryMap> gt);

struct LossComponents {
  LossReport contrastive;
  LossReport frame;
  LossReport boundary;
  LossReport modality_boundary;
};

/// Weighted sum; gradients are combined with the same weights.
LossReport TotalLoss(const LossComponents& c, const LossWeights& w);

}  // namespace forgeloc

#endif  // FORGELOC_LOSSES_HPP_
