// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_STATS_HPP_
#define FORGELOC_STATS_HPP_

#include <string>
#include <vector>

#include "forgeloc/manifest.hpp"

namespace forgeloc {

/// Fixed-width histogram over [0, bin_width * counts.size()) plus an
/// overflow bucket.
struct Histogram {
  double bin_width = 0.0;
  std::vector<int> counts;
  int overflow = 0;

  void Add(double x);
  int total() const;
};

struct ManifestStats {
  int videos = 0;
  int fake_videos = 0;
  int segments = 0;
  Histogram segment_length{0.1, std::vector<int>(20, 0), 0};  // seconds
  Histogram video_length{1.0, std::vector<int>(20, 0), 0};    // seconds
  std::vector<int> segment_count = std::vector<int>(4, 0);    // 0, 1, 2, 3+
  // Fractions of videos per (eta_v, eta_a): real, both, audio only, video only.
  double frac_real = 0.0;
  double frac_both = 0.0;
  double frac_audio_only = 0.0;
  double frac_video_only = 0.0;
  double mean_segment_length = 0.0;
  double frac_segments_under_1s = 0.0;
  double frac_videos_under_10s = 0.0;
};

/// All fields are zero for an empty manifest.
ManifestStats ComputeStats(const Manifest& manifest);

std::string StatsToJson(const ManifestStats& stats);

}  // namespace forgeloc

#endif  // FORGELOC_STATS_HPP_
