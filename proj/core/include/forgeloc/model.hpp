// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_MODEL_HPP_
#define FORGELOC_MODEL_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "forgeloc/boundary_map.hpp"
#include "forgeloc/fusion.hpp"
#include "forgeloc/nn.hpp"
#include "forgeloc/param_set.hpp"
#include "forgeloc/types.hpp"

namespace forgeloc {

/// Temporal convolution stack for one modality. The input is
/// `input_descriptor_dim` x frames; the output is `feature_dim` x frames.
/// Hidden layers use tanh; the last layer is linear.
struct EncoderConfig {
  int feature_dim = 8;
  int temporal_kernel = 3;
  int n_layers = 2;
  int input_descriptor_dim = 8;

  void Check() const;
};

struct ModelConfig {
  EncoderConfig video;
  EncoderConfig audio;  // input_descriptor_dim is the number of mel bins
  int classifier_kernel = 3;
  int max_duration = 8;  // D

  int feature_dim() const { return video.feature_dim; }
  void Check() const;
};

struct ModelParams {
  ModelConfig config;
  std::uint64_t seed = 0;
  ParamSet arrays;
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and zero biases,
/// drawn from a seeded mt19937_64.
ModelParams InitParams(const ModelConfig& config, std::uint64_t seed);

/// Raw per-video model inputs. `descriptors` is video_dim x T, `spectrogram`
/// is T_a x mel_bins (time-major, as produced by a mel front end).
struct VideoInput {
  Matrix descriptors;
  Matrix spectrogram;

  int frames() const { return static_cast<int>(descriptors.cols()); }
};

FeatureSequence EncodeVideo(const Matrix& descriptors, const ModelParams& p);

/// Convolves the spectrogram over time at its native rate, then max-pools
/// T_a down to the video frame count `frames`. Throws if T_a < frames.
FeatureSequence EncodeAudio(const Matrix& spectrogram, int frames,
                            const ModelParams& p);

/// Per-frame fake probability from a single temporal convolution.
FrameLabelSequence ClassifyFrames(const FeatureSequence& f,
                                  const ModelParams& p, Modality m);

/// Boundary head: each valid cell pools (features ; frame predictions) over
/// its frames, applies a per-duration affine map, and squashes with a
/// sigmoid.
BoundaryMap PredictBoundaryMap(const FeatureSequence& f,
                               const FrameLabelSequence& frame_preds,
                               const ModelParams& p, Modality m);

/// Every intermediate needed by Backward.
struct EncoderTrace {
  std::vector<Matrix> inputs;  // input to each conv layer
  std::vector<Matrix> cols;    // Im2Col of each layer input
  nn::MaxPoolResult pool;      // audio only
  int pooled_from = 0;         // audio: frames before pooling
};

struct ForwardTrace {
  EncoderTrace video_enc;
  EncoderTrace audio_enc;
  FeatureSequence f_v, f_a;
  FrameLabelSequence y_v, y_a;
  Matrix head_in_v, head_in_a;  // (C_f + 1) x T
  BoundaryMap m_v, m_a;
  FusionTrace fusion;
  BoundaryMap fused;
};

ForwardTrace Forward(const ModelParams& p, const VideoInput& in);

/// Fused boundary map only.
BoundaryMap Infer(const ModelParams& p, const VideoInput& in);

/// Loss gradients w.r.t. the forward outputs. Empty matrices mean zero.
struct OutputGrads {
  Matrix f_v, f_a;  // C_f x T
  Matrix y_v, y_a;  // T x 1
  Matrix m_v, m_a;  // D x T
  Matrix fused;     // D x T
};

/// Accumulates d(loss)/d(param) into `grads` (same names as p.arrays).
void Backward(const ModelParams& p, const VideoInput& in,
              const ForwardTrace& trace, const OutputGrads& dout,
              ParamSet* grads);

// Checkpoints are one JSON document holding the config, the seed and every
// named array with its shape (row-major data).
void SaveCheckpoint(std::ostream& out, const ModelParams& p);
void SaveCheckpointFile(const std::string& path, const ModelParams& p);
ModelParams LoadCheckpoint(std::istream& in);
ModelParams LoadCheckpointFile(const std::string& path);

}  // namespace forgeloc

#endif  // FORGELOC_MODEL_HPP_
