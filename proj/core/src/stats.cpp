// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace forgeloc {

using json = nlohmann::json;

void Histogram::Add(double x) {
  const double bin = std::floor(x / bin_width);
  if (bin < 0.0) {
    throw Error("histogram value must be nonnegative");
  }
  if (bin >= static_cast<double>(counts.size())) {
    ++overflow;
  } else {
    ++counts[static_cast<std::size_t>(bin)];
  }
}

int Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), overflow);
}

ManifestStats ComputeStats(const Manifest& manifest) {
  ManifestStats s;
  s.videos = static_cast<int>(manifest.size());
  if (manifest.empty()) return s;
  int real = 0, both = 0, audio_only = 0, video_only = 0;
  int under_1s = 0, under_10s = 0;
  double length_sum = 0.0;
  for (const VideoAnnotation& a : manifest) {
    if (a.is_fake()) ++s.fake_videos;
    if (!a.eta_v && !a.eta_a) ++real;
    if (a.eta_v && a.eta_a) ++both;
    if (!a.eta_v && a.eta_a) ++audio_only;
    if (a.eta_v && !a.eta_a) ++video_only;
    s.video_length.Add(a.duration);
    if (a.duration < 10.0) ++under_10s;
    const std::size_t n = a.fake_segments.size();
    ++s.segment_count[std::min<std::size_t>(n, 3)];
    for (const Segment& seg : a.fake_segments) {
      ++s.segments;
      s.segment_length.Add(seg.duration());
      length_sum += seg.duration();
      if (seg.duration() < 1.0) ++under_1s;
    }
  }
  const double nv = s.videos;
  s.frac_real = real / nv;
  s.frac_both = both / nv;
  s.frac_audio_only = audio_only / nv;
  s.frac_video_only = video_only / nv;
  s.frac_videos_under_10s = under_10s / nv;
  if (s.segments > 0) {
    s.mean_segment_length = length_sum / s.segments;
    s.frac_segments_under_1s = static_cast<double>(under_1s) / s.segments;
  }
  return s;
}

namespace {

json HistogramJson(const Histogram& h) {
  return {{"bin_width", h.bin_width}, {"counts", h.counts}, {"overflow", h.overflow}};
}

}  // namespace

std::string StatsToJson(const ManifestStats& s) {
  const json j = {
      {"videos", s.videos},
      {"fake_videos", s.fake_videos},
      {"segments", s.segments},
      {"segment_length_hist", HistogramJson(s.segment_length)},
      {"video_length_hist", HistogramJson(s.video_length)},
      {"segment_count", {{"0", s.segment_count[0]},
                         {"1", s.segment_count[1]},
                         {"2", s.segment_count[2]},
                         {"3+", s.segment_count[3]}}},
      {"modification_types", {{"real", s.frac_real},
                              {"fake_audio_fake_video", s.frac_both},
                              {"fake_audio_real_video", s.frac_audio_only},
                              {"real_audio_fake_video", s.frac_video_only}}},
      {"mean_segment_length", s.mean_segment_length},
      {"frac_segments_under_1s", s.frac_segments_under_1s},
      {"frac_videos_under_10s", s.frac_videos_under_10s}};
  return j.dump(2);
}

}  // namespace forgeloc
