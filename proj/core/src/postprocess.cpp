// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/postprocess.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "forgeloc/evaluation.hpp"
#include "forgeloc/labels.hpp"
#include "json.hpp"

namespace forgeloc {

using json = nlohmann::json;

const char* DecayMethodName(DecayMethod m) {
  return m == DecayMethod::kLinear ? "linear" : "gaussian";
}

DecayMethod ParseDecayMethod(const std::string& s) {
  if (s == "linear") return DecayMethod::kLinear;
  if (s == "gaussian") return DecayMethod::kGaussian;
  throw Error("unknown soft-nms method '" + s + "'");
}

void SoftNmsConfig::Check() const {
  if (method == DecayMethod::kGaussian && !(sigma > 0.0)) {
    throw Error("soft-nms sigma must be > 0");
  }
  if (method == DecayMethod::kLinear && !(iou_cut >= 0.0 && iou_cut <= 1.0)) {
    throw Error("soft-nms iou_cut must lie in [0, 1]");
  }
  if (top_k < 0) throw Error("soft-nms top_k must be nonnegative");
}

std::vector<Segment> SoftNms(std::vector<Segment> proposals,
                             const SoftNmsConfig& config) {
  config.Check();
  std::vector<Segment> kept;
  std::erase_if(proposals, [&](const Segment& s) {
    return s.score < config.score_floor;
  });
  while (!proposals.empty() &&
         kept.size() < static_cast<std::size_t>(config.top_k)) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < proposals.size(); ++i) {
      const Segment& a = proposals[i];
      const Segment& b = proposals[best];
      if (a.score > b.score ||
          (a.score == b.score &&
           (a.start < b.start ||
            (a.start == b.start && a.duration() < b.duration())))) {
        best = i;
      }
    }
    const Segment top = proposals[best];
    proposals.erase(proposals.begin() + static_cast<std::ptrdiff_t>(best));
    kept.push_back(top);
    for (Segment& s : proposals) {
      const double iou = Iou1d(top, s);
      if (config.method == DecayMethod::kGaussian) {
        s.score *= std::exp(-(iou * iou) / config.sigma);
      } else if (iou > config.iou_cut) {
        s.score *= 1.0 - iou;
      }
    }
    std::erase_if(proposals, [&](const Segment& s) {
      return s.score < config.score_floor;
    });
  }
  return kept;
}

std::vector<Segment> Decode(const BoundaryMap& map, double fps,
                            const SoftNmsConfig& config) {
  return SoftNms(ExtractProposals(map, fps, config.score_floor), config);
}

std::vector<Prediction> ReadPredictions(std::istream& in) {
  std::vector<Prediction> preds;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Prediction p;
    try {
      const json j = json::parse(line);
      p.video_id = j.at("video_id").get<std::string>();
      p.segment = {j.at("start").get<double>(), j.at("end").get<double>(),
                   j.at("score").get<double>()};
    } catch (const json::exception& e) {
      throw Error("prediction line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!p.segment.valid()) {
      throw Error("prediction line " + std::to_string(line_no) +
                  ": invalid segment");
    }
    preds.push_back(std::move(p));
  }
  return preds;
}

std::vector<Prediction> ReadPredictionsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open prediction file '" + path + "'");
  return ReadPredictions(in);
}

void WritePredictions(std::ostream& out, const std::vector<Prediction>& preds) {
  for (const Prediction& p : preds) {
    const json j = {{"video_id", p.video_id},
                    {"start", p.segment.start},
                    {"end", p.segment.end},
                    {"score", p.segment.score}};
    out << j.dump() << '\n';
  }
}

void WritePredictionsFile(const std::string& path,
                          const std::vector<Prediction>& preds) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write prediction file '" + path + "'");
  WritePredictions(out, preds);
}

std::vector<Prediction> DecodeAll(const std::vector<NamedMap>& maps,
                                  const SoftNmsConfig& config) {
  std::vector<Prediction> out;
  for (const NamedMap& m : maps) {
    for (const Segment& s : Decode(m.map, m.fps, config)) {
      out.push_back({m.video_id, s});
    }
  }
  return out;
}

SnmsSearchResult SearchSoftNms(const std::vector<NamedMap>& maps,
                               const Manifest& manifest, const SnmsGrid& grid) {
  SnmsSearchResult result;
  auto try_config = [&](const SoftNmsConfig& cfg) {
    const std::vector<Prediction> preds = DecodeAll(maps, cfg);
    double objective = 0.0;
    for (double thr : kApThresholds) {
      objective += AveragePrecision(preds, manifest, thr);
    }
    objective /= static_cast<double>(std::size(kApThresholds));
    result.trials.push_back({cfg, objective});
    if (objective > result.best_objective) {
      result.best_objective = objective;
      result.best = cfg;
    }
  };
  for (DecayMethod method : grid.methods) {
    const std::vector<double>& knobs =
        method == DecayMethod::kGaussian ? grid.sigmas : grid.iou_cuts;
    for (double knob : knobs) {
      for (double floor : grid.score_floors) {
        for (int k : grid.top_ks) {
          SoftNmsConfig cfg;
          cfg.method = method;
          if (method == DecayMethod::kGaussian) {
            cfg.sigma = knob;
          } else {
            cfg.iou_cut = knob;
          }
          cfg.score_floor = floor;
          cfg.top_k = k;
          try_config(cfg);
        }
      }
    }
  }
  if (result.trials.empty()) throw Error("soft-nms search grid is empty");
  return result;
}

}  // namespace forgeloc
