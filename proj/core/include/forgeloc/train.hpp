// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_TRAIN_HPP_
#define FORGELOC_TRAIN_HPP_

#include <functional>
#include <span>
#include <vector>

#include "forgeloc/losses.hpp"
#include "forgeloc/model.hpp"

namespace forgeloc {

/// Thrown when the loss or a parameter stops being finite.
class TrainingDiverged : public Error {
 public:
  explicit TrainingDiverged(int step);
  int step() const { return step_; }

 private:
  int step_;
};

/// Ground-truth targets for one video, derived from its annotation.
struct Targets {
  FrameLabelSequence y_v, y_a;
  BoundaryMap m, m_v, m_a;
  int pair_label = 1;
};

Targets MakeTargets(const VideoAnnotation& ann, int max_duration);

struct BatchResult {
  double loss = 0.0;
  LossComponents components;  // unweighted values and loss-input gradients
  ParamSet grads;             // empty unless requested
};

/// Full-batch forward pass, weighted total loss and (optionally) parameter
/// gradients. Samples are reduced in index order.
BatchResult EvaluateBatch(const ModelParams& p,
                          std::span<const VideoInput> inputs,
                          std::span<const Targets> targets,
                          const LossWeights& weights, bool with_grads);

struct TrainOptions {
  int steps = 1000;
  double learning_rate = 1.0;
  LossWeights weights;
  /// Called after every step with (step, loss before the update).
  std::function<void(int, double)> on_step;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> loss_trace;  // loss_trace[k]: loss before update k
};

/// Plain full-batch gradient descent on the weighted total loss.
/// Throws TrainingDiverged with the offending step index.
TrainResult Train(const ModelParams& init, std::span<const VideoInput> inputs,
                  std::span<const VideoAnnotation> anns,
                  const TrainOptions& options);

}  // namespace forgeloc

#endif  // FORGELOC_TRAIN_HPP_
