// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/train.hpp"

#include <cmath>

#include "forgeloc/labels.hpp"

namespace forgeloc {

TrainingDiverged::TrainingDiverged(int step)
    : Error("training diverged at step " + std::to_string(step)), step_(step) {}

Targets MakeTargets(const VideoAnnotation& ann, int max_duration) {
  Targets t;
  t.y_v = ModalityLabels(ann, Modality::kVideo);
  t.y_a = ModalityLabels(ann, Modality::kAudio);
  t.m = GtBoundaryMap(ann, ann.n_frames, max_duration);
  const BoundaryMap zero(max_duration, ann.n_frames);
  t.m_v = ann.eta_v ? t.m : zero;
  t.m_a = ann.eta_a ? t.m : zero;
  t.pair_label = PairLabel(ann);
  return t;
}

BatchResult EvaluateBatch(const ModelParams& p,
                          std::span<const VideoInput> inputs,
                          std::span<const Targets> targets,
                          const LossWeights& weights, bool with_grads) {
  if (inputs.size() != targets.size() || inputs.empty()) {
    throw ShapeError("batch inputs and targets differ in size");
  }
  const std::size_t n = inputs.size();
  std::vector<ForwardTrace> traces;
  traces.reserve(n);
  std::vector<FeatureSequence> f_v, f_a;
  std::vector<FrameLabelSequence> y_v, y_a, ty_v, ty_a;
  std::vector<BoundaryMap> m, m_v, m_a, tm, tm_v, tm_a;
  std::vector<int> pair;
  for (std::size_t i = 0; i < n; ++i) {
    traces.push_back(Forward(p, inputs[i]));
    const ForwardTrace& tr = traces.back();
    const Targets& tg = targets[i];
    if (tg.y_v.frames() != inputs[i].frames() ||
        tg.m.max_duration() != p.config.max_duration) {
      throw ShapeError("targets do not match the input/model shape");
    }
    f_v.push_back(tr.f_v);
    f_a.push_back(tr.f_a);
    y_v.push_back(tr.y_v);
    y_a.push_back(tr.y_a);
    m.push_back(tr.fused);
    m_v.push_back(tr.m_v);
    m_a.push_back(tr.m_a);
    ty_v.push_back(tg.y_v);
    ty_a.push_back(tg.y_a);
    tm.push_back(tg.m);
    tm_v.push_back(tg.m_v);
    tm_a.push_back(tg.m_a);
    pair.push_back(tg.pair_label);
  }

  BatchResult r;
  r.components.contrastive = ContrastiveLoss(f_v, f_a, pair, weights.delta);
  r.components.frame = FrameClassificationLoss(y_v, y_a, ty_v, ty_a);
  r.components.boundary = BoundaryLoss(m, tm);
  r.components.modality_boundary = ModalityBoundaryLoss(m_v, m_a, tm_v, tm_a);
  const LossReport total = TotalLoss(r.components, weights);
  r.loss = total.value;
  if (!with_grads) return r;

  r.grads = p.arrays.ZerosLike();
  for (std::size_t i = 0; i < n; ++i) {
    OutputGrads g;
    g.f_v = total.gradients.at(kGradFeaturesVideo)[i];
    g.f_a = total.gradients.at(kGradFeaturesAudio)[i];
    g.y_v = total.gradients.at(kGradFramesVideo)[i];
    g.y_a = total.gradients.at(kGradFramesAudio)[i];
    g.fused = total.gradients.at(kGradFusedMap)[i];
    g.m_v = total.gradients.at(kGradMapVideo)[i];
    g.m_a = total.gradients.at(kGradMapAudio)[i];
    Backward(p, inputs[i], traces[i], g, &r.grads);
  }
  return r;
}

TrainResult Train(const ModelParams& init, std::span<const VideoInput> inputs,
                  std::span<const VideoAnnotation> anns,
                  const TrainOptions& options) {
  options.weights.Check();
  if (inputs.size() != anns.size() || inputs.empty()) {
    throw ShapeError("training inputs and annotations differ in size");
  }
  if (options.steps < 0 || !std::isfinite(options.learning_rate)) {
    throw Error("invalid training schedule");
  }
  std::vector<Targets> targets;
  targets.reserve(anns.size());
  for (const VideoAnnotation& a : anns) {
    targets.push_back(MakeTargets(a, init.config.max_duration));
  }

  TrainResult result{init, {}};
  result.loss_trace.reserve(static_cast<std::size_t>(options.steps));
  for (int step = 0; step < options.steps; ++step) {
    BatchResult b =
        EvaluateBatch(result.params, inputs, targets, options.weights, true);
    if (!std::isfinite(b.loss) || !b.grads.AllFinite()) {
      throw TrainingDiverged(step);
    }
    result.loss_trace.push_back(b.loss);
    if (options.on_step) options.on_step(step, b.loss);
    result.params.arrays.Axpy(-options.learning_rate, b.grads);
    if (!result.params.arrays.AllFinite()) throw TrainingDiverged(step);
  }
  return result;
}

}  // namespace forgeloc
