// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/labels.hpp"

#include <algorithm>
#include <cmath>

namespace forgeloc {

double Iou1d(const Segment& a, const Segment& b) {
  const double inter =
      std::min(a.end, b.end) - std::max(a.start, b.start);
  if (inter <= 0.0) return 0.0;
  const double uni = std::max(a.end, b.end) - std::min(a.start, b.start);
  return inter / uni;
}

double SecondsToFrames(double seconds, double fps) {
  const double x = seconds * fps;
  const double r = std::round(x);
  return std::abs(x - r) < 1e-9 ? r : x;
}

Segment ToFrameUnits(const Segment& seg, double fps) {
  return {SecondsToFrames(seg.start, fps), SecondsToFrames(seg.end, fps),
          seg.score};
}

FrameLabelSequence FrameLabels(const VideoAnnotation& ann) {
  FrameLabelSequence labels(ann.n_frames);
  if (!ann.is_fake()) return labels;
  for (const Segment& s : ann.fake_segments) {
    const Segment f = ToFrameUnits(s, ann.fps);
    const int first = std::max(0, static_cast<int>(std::floor(f.start)));
    const int last =
        std::min(ann.n_frames, static_cast<int>(std::ceil(f.end)));
    for (int t = first; t < last; ++t) {
      const double overlap =
          std::min(t + 1.0, f.end) - std::max(static_cast<double>(t), f.start);
      if (overlap > 0.5) labels[t] = 1.0;
    }
  }
  return labels;
}

FrameLabelSequence ModalityLabels(const VideoAnnotation& ann, Modality m) {
  if (!ann.modified(m)) return FrameLabelSequence(ann.n_frames);
  return FrameLabels(ann);
}

}  // namespace forgeloc
