// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_LABELS_HPP_
#define FORGELOC_LABELS_HPP_

#include "forgeloc/types.hpp"

namespace forgeloc {

/// Temporal intersection-over-union of two half-open intervals. Scores are
/// ignored. Returns 0 for disjoint or touching intervals.
double Iou1d(const Segment& a, const Segment& b);

/// Converts seconds to (fractional) frame units. Values within 1e-9 of an
/// integer snap to it, so grid-aligned times survive the round trip.
double SecondsToFrames(double seconds, double fps);

/// Returns `seg` expressed in frame units (start * fps, end * fps).
Segment ToFrameUnits(const Segment& seg, double fps);

/// Frame t is fake when [t, t+1) (in frame units) overlaps some fake
/// segment by more than half a frame. Real videos yield all zeros.
FrameLabelSequence FrameLabels(const VideoAnnotation& ann);

/// FrameLabels(ann) if the modality was modified, else all zeros.
FrameLabelSequence ModalityLabels(const VideoAnnotation& ann, Modality m);

}  // namespace forgeloc

#endif  // FORGELOC_LABELS_HPP_
