// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_BOUNDARY_MAP_HPP_
#define FORGELOC_BOUNDARY_MAP_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "forgeloc/types.hpp"

namespace forgeloc {

/// D x T grid of proposal confidences. Cell (d, t) scores the proposal
/// covering frames [t, t + d + 1). Cells with t + d + 1 > T are invalid and
/// always hold 0.
class BoundaryMap {
 public:
  BoundaryMap() = default;
  BoundaryMap(int max_duration, int frames);
  /// Takes ownership of `values`; invalid cells are zeroed.
  explicit BoundaryMap(Matrix values);

  int max_duration() const { return static_cast<int>(values_.rows()); }
  int frames() const { return static_cast<int>(values_.cols()); }

  bool valid(int d, int t) const { return t + d + 1 <= frames(); }
  double operator()(int d, int t) const { return values_(d, t); }
  /// Throws Error on an invalid cell.
  void set(int d, int t, double v);

  const Matrix& values() const { return values_; }
  int valid_count() const;

  /// Boolean mask (1 valid, 0 invalid) as a matrix of the same shape.
  Matrix mask() const;

 private:
  Matrix values_;
};

/// 0/1 mask matrix for a D x T grid.
Matrix ValidMask(int max_duration, int frames);

/// Ground-truth map: each valid cell holds the best IoU between its proposal
/// and any fake segment (converted to frame units). Real videos give zeros.
BoundaryMap GtBoundaryMap(const VideoAnnotation& ann, int frames,
                          int max_duration);

/// GtBoundaryMap when the modality was modified, else the all-zero map.
BoundaryMap ModalityGtMap(const VideoAnnotation& ann, Modality m, int frames,
                          int max_duration);

/// One proposal per valid cell with value >= score_floor, in seconds.
/// Sorted by score descending, then start ascending, then duration ascending.
std::vector<Segment> ExtractProposals(const BoundaryMap& map, double fps,
                                      double score_floor);

// Serialization. One map per JSON line:
//   {"video_id": "...", "D": 8, "T": 32, "fps": 25.0, "values": [...]}
// with `values` row-major (duration-major) of length D * T.
struct NamedMap {
  std::string video_id;
  double fps = 0.0;
  BoundaryMap map;
};

std::string MapToJson(const NamedMap& m);
NamedMap MapFromJson(const std::string& line);

std::vector<NamedMap> ReadMaps(std::istream& in);
std::vector<NamedMap> ReadMapsFile(const std::string& path);
void WriteMaps(std::ostream& out, const std::vector<NamedMap>& maps);
void WriteMapsFile(const std::string& path, const std::vector<NamedMap>& maps);

}  // namespace forgeloc

#endif  // FORGELOC_BOUNDARY_MAP_HPP_
