// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "forgeloc/labels.hpp"
#include "json.hpp"

namespace forgeloc {

using json = nlohmann::json;

namespace {

Vector UnitDirection(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> normal;
  Vector u(dim);
  for (int i = 0; i < dim; ++i) u[i] = normal(rng);
  return u / u.norm();
}

// Frame-index segments [start, start + len) that do not touch each other.
std::vector<std::pair<int, int>> PlaceSegments(std::mt19937_64& rng,
                                               const FixtureConfig& c,
                                               int count) {
  std::uniform_int_distribution<int> len_dist(c.min_segment_frames,
                                              c.max_duration);
  for (;;) {
    std::vector<std::pair<int, int>> segs;
    for (int k = 0; k < count; ++k) {
      const int len = len_dist(rng);
      std::uniform_int_distribution<int> start_dist(0, c.frames - len);
      segs.push_back({start_dist(rng), len});
    }
    std::sort(segs.begin(), segs.end());
    bool ok = true;
    for (std::size_t k = 1; k < segs.size(); ++k) {
      if (segs[k].first <= segs[k - 1].first + segs[k - 1].second) ok = false;
    }
    if (ok) return segs;
  }
}

json MatrixRowMajor(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
  }
  return a;
}

Matrix MatrixFromJson(const json& a, int rows, int cols, const char* what) {
  if (rows <= 0 || cols <= 0 ||
      a.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw ShapeError(std::string(what) + ": data length does not match shape");
  }
  Matrix m(rows, cols);
  std::size_t i = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = a[i++].get<double>();
  }
  if (!m.allFinite()) throw Error(std::string(what) + ": non-finite value");
  return m;
}

}  // namespace

void FixtureConfig::Check() const {
  if (n_videos <= 0 || frames <= 0 || feature_dim <= 0 || max_duration <= 0 ||
      audio_ratio <= 0) {
    throw Error("fixture dimensions must be positive");
  }
  if (min_segment_frames < 1 || min_segment_frames > max_duration ||
      max_duration > frames) {
    throw Error("fixture segment lengths must satisfy 1 <= min <= D <= T");
  }
  if (!(fps > 0.0) || !(noise >= 0.0) || !(content_scale >= 0.0) ||
      !std::isfinite(separability)) {
    throw Error("fixture fps, noise, content scale and separability must be valid");
  }
  if (!(two_segment_prob >= 0.0 && two_segment_prob <= 1.0) ||
      !(train_fraction >= 0.0 && val_fraction >= 0.0 &&
        train_fraction + val_fraction <= 1.0)) {
    throw Error("fixture probabilities and split fractions must lie in [0, 1]");
  }
  if (two_segment_prob > 0.0 && 2 * min_segment_frames + 1 > frames) {
    throw Error("fixture too short for two separated segments");
  }
}

FixtureSet SynthFixtures(const FixtureConfig& c) {
  c.Check();
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const Vector u_v = UnitDirection(rng, c.feature_dim);
  const Vector u_a = UnitDirection(rng, c.feature_dim);
  // Orthonormal basis of span(u_v, u_a) for the anisotropic latent.
  Matrix basis(c.feature_dim, 0);
  for (const Vector* u : {&u_v, &u_a}) {
    Vector r = *u - basis * (basis.transpose() * *u);
    if (r.norm() > 1e-9) {
      basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
      basis.col(basis.cols() - 1) = r / r.norm();
    }
  }
  auto latent = [&] {
    Vector g(c.feature_dim);
    for (int k = 0; k < c.feature_dim; ++k) g[k] = normal(rng);
    const Vector inside = basis * (basis.transpose() * g);
    return Vector(inside + c.content_scale * (g - inside));
  };

  // Balanced (eta_v, eta_a) types: real, both, audio only, video only.
  std::vector<int> types(static_cast<std::size_t>(c.n_videos));
  for (int i = 0; i < c.n_videos; ++i) types[static_cast<std::size_t>(i)] = i % 4;
  std::shuffle(types.begin(), types.end(), rng);

  const int n_train = static_cast<int>(std::lround(c.train_fraction * c.n_videos));
  const int n_val = static_cast<int>(std::lround(c.val_fraction * c.n_videos));
  const int ta = c.frames * c.audio_ratio;
  const int width = static_cast<int>(std::to_string(c.n_videos - 1).size());

  FixtureSet set;
  for (int i = 0; i < c.n_videos; ++i) {
    VideoAnnotation ann;
    std::ostringstream id;
    id << "synth_" << std::setw(width) << std::setfill('0') << i;
    ann.video_id = id.str();
    ann.fps = c.fps;
    ann.n_frames = c.frames;
    ann.duration = c.frames / c.fps;
    const int type = types[static_cast<std::size_t>(i)];
    ann.eta_v = type == 1 || type == 3;
    ann.eta_a = type == 1 || type == 2;
    ann.split = i < n_train           ? Split::kTrain
                : i < n_train + n_val ? Split::kVal
                                      : Split::kTest;

    std::vector<char> fake(static_cast<std::size_t>(c.frames), 0);
    if (ann.is_fake()) {
      const int count = uniform(rng) < c.two_segment_prob ? 2 : 1;
      for (const auto& [start, len] : PlaceSegments(rng, c, count)) {
        ann.fake_segments.push_back(
            {start / c.fps, (start + len) / c.fps, 1.0});
        for (int t = start; t < start + len; ++t) fake[static_cast<std::size_t>(t)] = 1;
      }
    }
    CheckAnnotation(ann);

    VideoInput in;
    in.descriptors.resize(c.feature_dim, c.frames);
    in.spectrogram.resize(ta, c.feature_dim);
    for (int t = 0; t < c.frames; ++t) {
      const Vector z = latent();
      const Vector z_other = latent();
      const bool f = fake[static_cast<std::size_t>(t)] != 0;
      Vector v = (f && ann.eta_v) ? Vector(z_other + c.separability * u_v) : z;
      Vector a = (f && ann.eta_a) ? Vector(z_other + c.separability * u_a) : z;
      for (int k = 0; k < c.feature_dim; ++k) {
        in.descriptors(k, t) = v[k] + c.noise * normal(rng);
      }
      for (int s = t * c.audio_ratio; s < (t + 1) * c.audio_ratio; ++s) {
        for (int k = 0; k < c.feature_dim; ++k) {
          in.spectrogram(s, k) = a[k] + c.noise * normal(rng);
        }
      }
    }
    set.manifest.push_back(std::move(ann));
    set.inputs.push_back(std::move(in));
  }
  return set;
}

FixtureSet SelectSplit(const FixtureSet& set, Split split) {
  FixtureSet out;
  for (std::size_t i = 0; i < set.manifest.size(); ++i) {
    if (set.manifest[i].split != split) continue;
    out.manifest.push_back(set.manifest[i]);
    out.inputs.push_back(set.inputs[i]);
  }
  return out;
}

void WriteFeatures(std::ostream& out, const FixtureSet& set) {
  if (set.manifest.size() != set.inputs.size()) {
    throw ShapeError("fixture manifest and inputs differ in size");
  }
  for (std::size_t i = 0; i < set.inputs.size(); ++i) {
    const VideoInput& in = set.inputs[i];
    const json j = {{"video_id", set.manifest[i].video_id},
                    {"descriptor_dim", in.descriptors.rows()},
                    {"frames", in.descriptors.cols()},
                    {"descriptors", MatrixRowMajor(in.descriptors)},
                    {"spec_frames", in.spectrogram.rows()},
                    {"mel_bins", in.spectrogram.cols()},
                    {"spectrogram", MatrixRowMajor(in.spectrogram)}};
    out << j.dump() << '\n';
  }
}

void WriteFeaturesFile(const std::string& path, const FixtureSet& set) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write feature file '" + path + "'");
  WriteFeatures(out, set);
}

std::map<std::string, VideoInput> ReadFeatures(std::istream& in) {
  std::map<std::string, VideoInput> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "feature line " + std::to_string(line_no);
    try {
      const json j = json::parse(line);
      VideoInput v;
      v.descriptors = MatrixFromJson(j.at("descriptors"), j.at("descriptor_dim").get<int>(),
                                     j.at("frames").get<int>(), where.c_str());
      v.spectrogram = MatrixFromJson(j.at("spectrogram"), j.at("spec_frames").get<int>(),
                                     j.at("mel_bins").get<int>(), where.c_str());
      const std::string id = j.at("video_id").get<std::string>();
      if (!out.emplace(id, std::move(v)).second) {
        throw Error(where + ": duplicate video_id '" + id + "'");
      }
    } catch (const json::exception& e) {
      throw Error(where + ": " + e.what());
    }
  }
  return out;
}

std::map<std::string, VideoInput> ReadFeaturesFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open feature file '" + path + "'");
  return ReadFeatures(in);
}

FixtureSet Align(const Manifest& manifest,
                 const std::map<std::string, VideoInput>& features) {
  FixtureSet out;
  for (const VideoAnnotation& a : manifest) {
    auto it = features.find(a.video_id);
    if (it == features.end()) {
      throw Error("no features for video '" + a.video_id + "'");
    }
    if (it->second.frames() != a.n_frames) {
      throw ShapeError("features of '" + a.video_id + "' have " +
                       std::to_string(it->second.frames()) + " frames, manifest says " +
                       std::to_string(a.n_frames));
    }
    out.manifest.push_back(a);
    out.inputs.push_back(it->second);
  }
  return out;
}

}  // namespace forgeloc
