// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/pipeline.hpp"

#include <chrono>

namespace forgeloc {

ModelConfig ConfigForInputs(const std::vector<VideoInput>& inputs,
                            int feature_dim, int max_duration) {
  if (inputs.empty()) throw Error("no inputs to derive a model configuration from");
  ModelConfig c;
  c.video.feature_dim = feature_dim;
  c.audio.feature_dim = feature_dim;
  c.video.input_descriptor_dim = static_cast<int>(inputs.front().descriptors.rows());
  c.audio.input_descriptor_dim = static_cast<int>(inputs.front().spectrogram.cols());
  c.max_duration = max_duration;
  for (const VideoInput& in : inputs) {
    if (in.descriptors.rows() != c.video.input_descriptor_dim ||
        in.spectrogram.cols() != c.audio.input_descriptor_dim) {
      throw ShapeError("inputs disagree in descriptor or mel dimension");
    }
  }
  c.Check();
  return c;
}

std::vector<NamedMap> InferMaps(const ModelParams& p, const FixtureSet& set) {
  std::vector<NamedMap> maps;
  maps.reserve(set.inputs.size());
  for (std::size_t i = 0; i < set.inputs.size(); ++i) {
    maps.push_back({set.manifest[i].video_id, set.manifest[i].fps,
                    Infer(p, set.inputs[i])});
  }
  return maps;
}

ExperimentResult RunExperiment(const FixtureSet& set,
                               const ExperimentOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const FixtureSet train = SelectSplit(set, Split::kTrain);
  const FixtureSet test = SelectSplit(set, Split::kTest);
  if (train.inputs.empty() || test.inputs.empty()) {
    throw Error("fixture set needs non-empty train and test splits");
  }
  ModelConfig config = ConfigForInputs(set.inputs, o.feature_dim, o.max_duration);
  config.video.n_layers = config.audio.n_layers = o.n_layers;
  config.video.temporal_kernel = config.audio.temporal_kernel = o.temporal_kernel;
  const ModelParams init = InitParams(config, o.seed);

  ExperimentResult r;
  r.initial = Evaluate(test.manifest, DecodeAll(InferMaps(init, test), o.snms));
  TrainResult trained = Train(init, train.inputs, train.manifest, o.train);
  r.loss_trace = std::move(trained.loss_trace);
  r.params = std::move(trained.params);
  r.final = Evaluate(test.manifest, DecodeAll(InferMaps(r.params, test), o.snms));
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace forgeloc
