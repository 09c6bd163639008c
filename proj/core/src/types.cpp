// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace forgeloc {

const char* ModalityName(Modality m) {
  return m == Modality::kVideo ? "video" : "audio";
}

bool Segment::valid() const {
  return std::isfinite(start) && std::isfinite(end) && start >= 0.0 &&
         end > start && score >= 0.0 && score <= 1.0;
}

void CheckSegment(const Segment& s) {
  if (s.valid()) return;
  std::ostringstream msg;
  msg << "invalid segment [" << s.start << ", " << s.end << ") score "
      << s.score;
  throw Error(msg.str());
}

const char* SplitName(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
    case Split::kNone:
      break;
  }
  return "";
}

std::optional<Split> ParseSplit(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  if (s.empty()) return Split::kNone;
  return std::nullopt;
}

void CheckAnnotation(const VideoAnnotation& ann) {
  auto fail = [&](const std::string& what) {
    throw Error("annotation '" + ann.video_id + "': " + what);
  };
  if (!(ann.fps > 0.0) || !std::isfinite(ann.fps)) fail("fps must be > 0");
  if (!(ann.duration > 0.0) || !std::isfinite(ann.duration)) {
    fail("duration must be > 0");
  }
  if (ann.n_frames != static_cast<int>(std::lround(ann.duration * ann.fps))) {
    fail("n_frames != round(duration * fps)");
  }
  if (!ann.is_fake() && !ann.fake_segments.empty()) {
    fail("real video (eta_v = eta_a = 0) must not have fake segments");
  }
  std::vector<Segment> sorted = ann.fake_segments;
  for (const Segment& s : sorted) {
    if (!s.valid()) fail("invalid fake segment");
    // Small tolerance: end times are often computed as frames / fps.
    if (s.end > ann.duration + 1e-9) fail("fake segment exceeds duration");
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Segment& a, const Segment& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].start < sorted[i - 1].end) fail("fake segments overlap");
  }
}

FeatureSequence::FeatureSequence(Matrix data) : data_(std::move(data)) {
  if (data_.rows() <= 0 || data_.cols() <= 0) {
    throw ShapeError("feature sequence must have positive dimensions");
  }
  if (!data_.allFinite()) throw Error("feature sequence has non-finite entries");
}

FeatureSequence::FeatureSequence(int channels, int frames)
    : FeatureSequence(Matrix::Zero(channels, frames)) {}

FrameLabelSequence::FrameLabelSequence(Vector values)
    : values_(std::move(values)) {
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
      throw Error("frame label outside [0, 1]");
    }
  }
}

FrameLabelSequence::FrameLabelSequence(int frames)
    : values_(Vector::Zero(frames)) {}

void CheckVideoMeta(const VideoMeta& meta, int frames) {
  if (meta.height <= 0 || meta.width <= 0 || meta.channels <= 0 ||
      meta.spectrogram_frames <= 0 || meta.mel_bins <= 0) {
    throw Error("video metadata dimensions must be positive");
  }
  if (meta.spectrogram_frames < frames) {
    throw Error("spectrogram has fewer frames than the video");
  }
}

}  // namespace forgeloc
