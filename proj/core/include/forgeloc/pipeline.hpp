// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_PIPELINE_HPP_
#define FORGELOC_PIPELINE_HPP_

#include <cstdint>
#include <vector>

#include "forgeloc/boundary_map.hpp"
#include "forgeloc/evaluation.hpp"
#include "forgeloc/fixtures.hpp"
#include "forgeloc/model.hpp"
#include "forgeloc/postprocess.hpp"
#include "forgeloc/train.hpp"

namespace forgeloc {

/// Model configuration whose input widths match `inputs` (which must be
/// non-empty and share their descriptor and mel dimensions).
ModelConfig ConfigForInputs(const std::vector<VideoInput>& inputs,
                            int feature_dim, int max_duration);

/// Fused boundary maps for every video of `set`, tagged with its id and fps.
std::vector<NamedMap> InferMaps(const ModelParams& p, const FixtureSet& set);

struct ExperimentOptions {
  std::uint64_t seed = 0;
  int feature_dim = 8;
  int max_duration = 8;
  int n_layers = 2;
  int temporal_kernel = 3;
  TrainOptions train;
  SoftNmsConfig snms;
};

struct ExperimentResult {
  EvalReport initial;  // held-out report before training
  EvalReport final;    // held-out report after training
  std::vector<double> loss_trace;
  ModelParams params;
  double seconds = 0.0;
};

/// Trains on the train split of `set` and evaluates on the test split.
ExperimentResult RunExperiment(const FixtureSet& set,
                               const ExperimentOptions& options);

}  // namespace forgeloc

#endif  // FORGELOC_PIPELINE_HPP_
