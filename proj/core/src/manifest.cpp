// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "forgeloc/labels.hpp"
#include "json.hpp"

namespace forgeloc {
namespace {

using json = nlohmann::json;

bool ReadFlag(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_boolean()) return v.get<bool>();
  const int i = v.get<int>();
  if (i != 0 && i != 1) throw Error(std::string(key) + " must be 0 or 1");
  return i == 1;
}

}  // namespace

std::string AnnotationToJson(const VideoAnnotation& ann) {
  json j;
  j["video_id"] = ann.video_id;
  j["duration"] = ann.duration;
  j["fps"] = ann.fps;
  j["n_frames"] = ann.n_frames;
  j["eta_v"] = ann.eta_v ? 1 : 0;
  j["eta_a"] = ann.eta_a ? 1 : 0;
  json segs = json::array();
  for (const Segment& s : ann.fake_segments) {
    segs.push_back({{"start", s.start}, {"end", s.end}});
  }
  j["fake_segments"] = std::move(segs);
  if (ann.split != Split::kNone) j["split"] = SplitName(ann.split);
  return j.dump();
}

VideoAnnotation AnnotationFromJson(const std::string& line) {
  VideoAnnotation ann;
  try {
    const json j = json::parse(line);
    ann.video_id = j.at("video_id").get<std::string>();
    ann.duration = j.at("duration").get<double>();
    ann.fps = j.at("fps").get<double>();
    ann.n_frames = j.at("n_frames").get<int>();
    ann.eta_v = ReadFlag(j, "eta_v");
    ann.eta_a = ReadFlag(j, "eta_a");
    for (const json& s : j.at("fake_segments")) {
      ann.fake_segments.push_back(
          {s.at("start").get<double>(), s.at("end").get<double>(), 1.0});
    }
    if (j.contains("split")) {
      const auto split = ParseSplit(j.at("split").get<std::string>());
      if (!split) throw Error("split must be one of train/val/test");
      ann.split = *split;
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed manifest record: ") + e.what());
  }
  CheckAnnotation(ann);
  return ann;
}

Manifest ReadManifest(std::istream& in) {
  Manifest manifest;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      manifest.push_back(AnnotationFromJson(line));
    } catch (const Error& e) {
      throw Error("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.insert(manifest.back().video_id).second) {
      throw Error("manifest line " + std::to_string(line_no) +
                  ": duplicate video_id '" + manifest.back().video_id + "'");
    }
  }
  return manifest;
}

Manifest ReadManifestFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest '" + path + "'");
  return ReadManifest(in);
}

void WriteManifest(std::ostream& out, const Manifest& manifest) {
  for (const VideoAnnotation& ann : manifest) out << AnnotationToJson(ann) << '\n';
}

void WriteManifestFile(const std::string& path, const Manifest& manifest) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest '" + path + "'");
  WriteManifest(out, manifest);
}

const VideoAnnotation* FindVideo(const Manifest& manifest,
                                 const std::string& video_id) {
  auto it = std::find_if(manifest.begin(), manifest.end(),
                         [&](const VideoAnnotation& a) {
                           return a.video_id == video_id;
                         });
  return it == manifest.end() ? nullptr : &*it;
}

Manifest FilterSplit(const Manifest& manifest, Split split) {
  Manifest out;
  std::copy_if(manifest.begin(), manifest.end(), std::back_inserter(out),
               [&](const VideoAnnotation& a) { return a.split == split; });
  return out;
}

Manifest VisualSubset(const Manifest& manifest) {
  Manifest out;
  std::copy_if(manifest.begin(), manifest.end(), std::back_inserter(out),
               [](const VideoAnnotation& a) { return !(a.eta_a && !a.eta_v); });
  return out;
}

int DefaultMaxDuration(const Manifest& manifest) {
  double longest = 0.0;
  for (const VideoAnnotation& ann : manifest) {
    for (const Segment& s : ann.fake_segments) {
      longest = std::max(longest, ToFrameUnits(s, ann.fps).duration());
    }
  }
  return std::max(1, static_cast<int>(std::ceil(longest)));
}

}  // namespace forgeloc
