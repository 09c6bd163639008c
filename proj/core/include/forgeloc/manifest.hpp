// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_MANIFEST_HPP_
#define FORGELOC_MANIFEST_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "forgeloc/types.hpp"

namespace forgeloc {

// Manifest files are JSON-lines, one VideoAnnotation per line:
//   {"video_id": "...", "duration": 1.28, "fps": 25, "n_frames": 32,
//    "eta_v": 1, "eta_a": 0, "fake_segments": [{"start": .., "end": ..}],
//    "split": "train"}
// "split" is optional. Blank lines are skipped.

using Manifest = std::vector<VideoAnnotation>;

Manifest ReadManifest(std::istream& in);
Manifest ReadManifestFile(const std::string& path);

void WriteManifest(std::ostream& out, const Manifest& manifest);
void WriteManifestFile(const std::string& path, const Manifest& manifest);

/// Single-line JSON encoding of one annotation.
std::string AnnotationToJson(const VideoAnnotation& ann);
VideoAnnotation AnnotationFromJson(const std::string& line);

const VideoAnnotation* FindVideo(const Manifest& manifest,
                                 const std::string& video_id);

Manifest FilterSplit(const Manifest& manifest, Split split);

/// Drops audio-only manipulations (eta_a = 1, eta_v = 0). Real videos stay.
Manifest VisualSubset(const Manifest& manifest);

/// ceil(longest fake segment * fps) over the manifest; 1 if no segments.
int DefaultMaxDuration(const Manifest& manifest);

}  // namespace forgeloc

#endif  // FORGELOC_MANIFEST_HPP_
