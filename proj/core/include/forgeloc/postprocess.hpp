// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_POSTPROCESS_HPP_
#define FORGELOC_POSTPROCESS_HPP_

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "forgeloc/boundary_map.hpp"
#include "forgeloc/manifest.hpp"
#include "forgeloc/types.hpp"

namespace forgeloc {

enum class DecayMethod { kLinear, kGaussian };

const char* DecayMethodName(DecayMethod m);
DecayMethod ParseDecayMethod(const std::string& s);

struct SoftNmsConfig {
  DecayMethod method = DecayMethod::kGaussian;
  double sigma = 0.3;    // gaussian: f = exp(-iou^2 / sigma)
  double iou_cut = 0.3;  // linear: f = 1 - iou when iou > iou_cut
  double score_floor = 0.01;
  int top_k = 100;

  void Check() const;
};

/// Sequential Soft-NMS. Repeatedly keeps the highest-scoring proposal
/// (ties: earlier start, then shorter duration), decays the remaining scores
/// by f(IoU with it), and drops any that fall below score_floor. Returns at
/// most top_k proposals in selection order, which is score-descending.
std::vector<Segment> SoftNms(std::vector<Segment> proposals,
                             const SoftNmsConfig& config);

/// ExtractProposals at config.score_floor followed by SoftNms.
std::vector<Segment> Decode(const BoundaryMap& map, double fps,
                            const SoftNmsConfig& config);

/// One row of a prediction file.
struct Prediction {
  std::string video_id;
  Segment segment;
};

// Prediction files are JSON-lines: {"video_id", "start", "end", "score"}.
std::vector<Prediction> ReadPredictions(std::istream& in);
std::vector<Prediction> ReadPredictionsFile(const std::string& path);
void WritePredictions(std::ostream& out, const std::vector<Prediction>& preds);
void WritePredictionsFile(const std::string& path,
                          const std::vector<Prediction>& preds);

/// Decodes every map and tags the segments with the map's video id.
std::vector<Prediction> DecodeAll(const std::vector<NamedMap>& maps,
                                  const SoftNmsConfig& config);

struct SnmsGrid {
  std::vector<DecayMethod> methods = {DecayMethod::kGaussian,
                                      DecayMethod::kLinear};
  std::vector<double> sigmas = {0.1, 0.2, 0.3, 0.5, 0.7, 1.0};
  std::vector<double> iou_cuts = {0.1, 0.3, 0.5, 0.7};
  std::vector<double> score_floors = {0.0, 0.01, 0.05};
  std::vector<int> top_ks = {100};
};

struct SnmsTrial {
  SoftNmsConfig config;
  double objective = 0.0;
};

struct SnmsSearchResult {
  SoftNmsConfig best;
  double best_objective = -1.0;
  std::vector<SnmsTrial> trials;
};

/// Exhaustive search over `grid` maximizing mean AP over {0.5, 0.75, 0.95}
/// on a validation manifest. The first configuration wins ties.
SnmsSearchResult SearchSoftNms(const std::vector<NamedMap>& maps,
                               const Manifest& manifest, const SnmsGrid& grid);

}  // namespace forgeloc

#endif  // FORGELOC_POSTPROCESS_HPP_
