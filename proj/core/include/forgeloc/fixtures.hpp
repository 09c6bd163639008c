// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_FIXTURES_HPP_
#define FORGELOC_FIXTURES_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "forgeloc/manifest.hpp"
#include "forgeloc/model.hpp"

namespace forgeloc {

/// Synthetic dataset generator. Every frame draws a latent vector shared by
/// both streams of a real pair. Inside a fake segment the modified stream
/// instead draws an independent latent and is shifted by
/// `separability * u_m` for a fixed per-modality unit direction u_m. The
/// latent has unit variance inside span(u_v, u_a) and `content_scale`
/// standard deviation in the orthogonal complement.
struct FixtureConfig {
  std::uint64_t seed = 0;
  int n_videos = 400;
  int frames = 32;           // T
  int feature_dim = 8;       // video descriptor dim and mel bins
  int max_duration = 8;      // longest segment in frames
  int min_segment_frames = 2;
  int audio_ratio = 2;       // spectrogram frames per video frame
  double fps = 25.0;
  double separability = 8.0;
  double noise = 0.5;        // per-stream observation noise
  double content_scale = 8.0;
  double two_segment_prob = 0.15;
  double train_fraction = 0.6;
  double val_fraction = 0.15;

  void Check() const;
};

/// manifest[i] describes inputs[i].
struct FixtureSet {
  Manifest manifest;
  std::vector<VideoInput> inputs;
};

/// Deterministic in `config`. The four (eta_v, eta_a) types are balanced
/// to within one video and shuffled; splits are assigned in order.
FixtureSet SynthFixtures(const FixtureConfig& config);

/// Rows of `set` whose annotation lies in `split`.
FixtureSet SelectSplit(const FixtureSet& set, Split split);

// Feature files are JSON-lines with one video per line:
// {"video_id", "descriptor_dim", "frames", "descriptors" (row-major d x T),
//  "spec_frames", "mel_bins", "spectrogram" (row-major T_a x F_m)}.
void WriteFeatures(std::ostream& out, const FixtureSet& set);
void WriteFeaturesFile(const std::string& path, const FixtureSet& set);
std::map<std::string, VideoInput> ReadFeatures(std::istream& in);
std::map<std::string, VideoInput> ReadFeaturesFile(const std::string& path);

/// Pairs every manifest entry with its features. Throws if one is missing
/// or its frame count disagrees with the annotation.
FixtureSet Align(const Manifest& manifest,
                 const std::map<std::string, VideoInput>& features);

}  // namespace forgeloc

#endif  // FORGELOC_FIXTURES_HPP_
