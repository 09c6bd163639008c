// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_TYPES_HPP_
#define FORGELOC_TYPES_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace forgeloc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when two tensors that must agree in shape do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

enum class Modality { kVideo, kAudio };

const char* ModalityName(Modality m);

/// Half-open interval [start, end) in seconds with a confidence score.
/// Ground-truth segments carry score 1.
struct Segment {
  double start = 0.0;
  double end = 0.0;
  double score = 1.0;

  double duration() const { return end - start; }
  bool valid() const;
};

/// Throws Error if the segment violates start >= 0, end > start or
/// score in [0, 1].
void CheckSegment(const Segment& s);

enum class Split { kNone, kTrain, kVal, kTest };

const char* SplitName(Split s);
std::optional<Split> ParseSplit(const std::string& s);

struct VideoAnnotation {
  std::string video_id;
  double duration = 0.0;
  double fps = 0.0;
  int n_frames = 0;
  bool eta_v = false;  // video stream modified
  bool eta_a = false;  // audio stream modified
  std::vector<Segment> fake_segments;
  Split split = Split::kNone;

  bool is_fake() const { return eta_v || eta_a; }
  bool modified(Modality m) const {
    return m == Modality::kVideo ? eta_v : eta_a;
  }
};

/// Throws Error naming the violated invariant: n_frames = round(duration *
/// fps), real videos carry no segments, segments are valid, pairwise
/// disjoint and inside [0, duration].
void CheckAnnotation(const VideoAnnotation& ann);

/// Channels x frames feature matrix for one modality.
class FeatureSequence {
 public:
  FeatureSequence() = default;
  explicit FeatureSequence(Matrix data);
  FeatureSequence(int channels, int frames);

  int channels() const { return static_cast<int>(data_.rows()); }
  int frames() const { return static_cast<int>(data_.cols()); }
  const Matrix& data() const { return data_; }
  Matrix& mutable_data() { return data_; }

 private:
  Matrix data_;
};

/// Per-frame labels (binary ground truth) or fake probabilities.
class FrameLabelSequence {
 public:
  FrameLabelSequence() = default;
  explicit FrameLabelSequence(Vector values);
  explicit FrameLabelSequence(int frames);

  int frames() const { return static_cast<int>(values_.size()); }
  double operator[](int t) const { return values_[t]; }
  double& operator[](int t) { return values_[t]; }
  const Vector& values() const { return values_; }
  double sum() const { return values_.sum(); }

 private:
  Vector values_;
};

/// Shape metadata for one raw video; media itself is never decoded.
struct VideoMeta {
  int height = 0;
  int width = 0;
  int channels = 0;
  int spectrogram_frames = 0;
  int mel_bins = 0;
};

void CheckVideoMeta(const VideoMeta& meta, int frames);

}  // namespace forgeloc

#endif  // FORGELOC_TYPES_HPP_
