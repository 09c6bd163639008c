// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/boundary_map.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "forgeloc/labels.hpp"
#include "json.hpp"

namespace forgeloc {

using json = nlohmann::json;

BoundaryMap::BoundaryMap(int max_duration, int frames) {
  if (max_duration <= 0 || frames <= 0) {
    throw ShapeError("boundary map dimensions must be positive");
  }
  values_ = Matrix::Zero(max_duration, frames);
}

BoundaryMap::BoundaryMap(Matrix values) : values_(std::move(values)) {
  if (values_.rows() <= 0 || values_.cols() <= 0) {
    throw ShapeError("boundary map dimensions must be positive");
  }
  const int T = frames();
  for (int d = 0; d < max_duration(); ++d) {
    for (int t = std::max(0, T - d); t < T; ++t) values_(d, t) = 0.0;
  }
}

void BoundaryMap::set(int d, int t, double v) {
  if (d < 0 || t < 0 || d >= max_duration() || !valid(d, t)) {
    throw Error("boundary map cell (" + std::to_string(d) + ", " +
                std::to_string(t) + ") is not valid");
  }
  values_(d, t) = v;
}

int BoundaryMap::valid_count() const {
  int n = 0;
  for (int d = 0; d < max_duration(); ++d) n += std::max(0, frames() - d);
  return n;
}

Matrix BoundaryMap::mask() const { return ValidMask(max_duration(), frames()); }

Matrix ValidMask(int max_duration, int frames) {
  Matrix m = Matrix::Zero(max_duration, frames);
  for (int d = 0; d < max_duration; ++d) {
    for (int t = 0; t + d + 1 <= frames; ++t) m(d, t) = 1.0;
  }
  return m;
}

BoundaryMap GtBoundaryMap(const VideoAnnotation& ann, int frames,
                          int max_duration) {
  BoundaryMap map(max_duration, frames);
  if (!ann.is_fake()) return map;
  std::vector<Segment> gts;
  gts.reserve(ann.fake_segments.size());
  for (const Segment& s : ann.fake_segments) gts.push_back(ToFrameUnits(s, ann.fps));
  for (int d = 0; d < max_duration; ++d) {
    for (int t = 0; t + d + 1 <= frames; ++t) {
      const Segment cand{static_cast<double>(t), static_cast<double>(t + d + 1)};
      double best = 0.0;
      for (const Segment& g : gts) best = std::max(best, Iou1d(cand, g));
      map.set(d, t, best);
    }
  }
  return map;
}

BoundaryMap ModalityGtMap(const VideoAnnotation& ann, Modality m, int frames,
                          int max_duration) {
  if (!ann.modified(m)) return BoundaryMap(max_duration, frames);
  return GtBoundaryMap(ann, frames, max_duration);
}

std::vector<Segment> ExtractProposals(const BoundaryMap& map, double fps,
                                      double score_floor) {
  struct Cell {
    int d, t;
    double score;
  };
  std::vector<Cell> cells;
  for (int d = 0; d < map.max_duration(); ++d) {
    for (int t = 0; map.valid(d, t); ++t) {
      if (map(d, t) >= score_floor) cells.push_back({d, t, map(d, t)});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.t != b.t) return a.t < b.t;
    return a.d < b.d;
  });
  std::vector<Segment> out;
  out.reserve(cells.size());
  for (const Cell& c : cells) {
    out.push_back({c.t / fps, (c.t + c.d + 1) / fps, c.score});
  }
  return out;
}

std::string MapToJson(const NamedMap& m) {
  json j;
  j["video_id"] = m.video_id;
  j["D"] = m.map.max_duration();
  j["T"] = m.map.frames();
  j["fps"] = m.fps;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(m.map.values().size()));
  for (int d = 0; d < m.map.max_duration(); ++d) {
    for (int t = 0; t < m.map.frames(); ++t) values.push_back(m.map(d, t));
  }
  j["values"] = std::move(values);
  return j.dump();
}

NamedMap MapFromJson(const std::string& line) {
  NamedMap out;
  try {
    const json j = json::parse(line);
    out.video_id = j.value("video_id", std::string());
    out.fps = j.at("fps").get<double>();
    const int D = j.at("D").get<int>();
    const int T = j.at("T").get<int>();
    const auto values = j.at("values").get<std::vector<double>>();
    if (D <= 0 || T <= 0 || values.size() != static_cast<std::size_t>(D) * T) {
      throw Error("boundary map values do not match D x T");
    }
    Matrix m(D, T);
    for (int d = 0; d < D; ++d) {
      for (int t = 0; t < T; ++t) m(d, t) = values[static_cast<std::size_t>(d) * T + t];
    }
    out.map = BoundaryMap(std::move(m));
  } catch (const json::exception& e) {
    throw Error(std::string("malformed boundary map record: ") + e.what());
  }
  if (!(out.fps > 0.0)) throw Error("boundary map fps must be > 0");
  return out;
}

std::vector<NamedMap> ReadMaps(std::istream& in) {
  std::vector<NamedMap> maps;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    maps.push_back(MapFromJson(line));
  }
  return maps;
}

std::vector<NamedMap> ReadMapsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open map file '" + path + "'");
  return ReadMaps(in);
}

void WriteMaps(std::ostream& out, const std::vector<NamedMap>& maps) {
  for (const NamedMap& m : maps) out << MapToJson(m) << '\n';
}

void WriteMapsFile(const std::string& path, const std::vector<NamedMap>& maps) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write map file '" + path + "'");
  WriteMaps(out, maps);
}

}  // namespace forgeloc
