// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/model.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

#include "json.hpp"

namespace forgeloc {
namespace {

using json = nlohmann::json;

std::string ConvName(const char* prefix, int layer, const char* what) {
  return std::string(prefix) + ".conv" + std::to_string(layer) + "." + what;
}

const char* EncoderPrefix(Modality m) {
  return m == Modality::kVideo ? "video" : "audio";
}

std::string HeadName(const char* head, Modality m, const char* what) {
  return std::string(head) + (m == Modality::kVideo ? "_v." : "_a.") + what;
}

const EncoderConfig& EncoderFor(const ModelConfig& c, Modality m) {
  return m == Modality::kVideo ? c.video : c.audio;
}

Matrix EncoderForward(const Matrix& x, const ModelParams& p, Modality m,
                      EncoderTrace* trace) {
  const EncoderConfig& cfg = EncoderFor(p.config, m);
  const char* prefix = EncoderPrefix(m);
  Matrix h = x;
  for (int i = 0; i < cfg.n_layers; ++i) {
    const Matrix& w = p.arrays[ConvName(prefix, i, "weight")];
    const Matrix& b = p.arrays[ConvName(prefix, i, "bias")];
    Matrix pre;
    if (trace) {
      Matrix cols = nn::Im2Col(h, cfg.temporal_kernel);
      pre.noalias() = w * cols;
      pre.colwise() += b.col(0);
      trace->cols.push_back(std::move(cols));
    } else {
      pre = nn::Conv1d(h, w, b, cfg.temporal_kernel);
    }
    Matrix next = (i + 1 < cfg.n_layers) ? Matrix(pre.array().tanh()) : std::move(pre);
    if (trace) trace->inputs.push_back(std::move(h));
    h = std::move(next);
  }
  return h;
}

void EncoderBackward(const ModelParams& p, Modality m, const EncoderTrace& trace,
                     Matrix dy, ParamSet* grads) {
  const EncoderConfig& cfg = EncoderFor(p.config, m);
  const char* prefix = EncoderPrefix(m);
  for (int i = cfg.n_layers - 1; i >= 0; --i) {
    if (i + 1 < cfg.n_layers) {
      // tanh'(pre) = 1 - tanh(pre)^2, and tanh(pre) is the next layer input.
      dy.array() *= 1.0 - trace.inputs[i + 1].array().square();
    }
    const std::string wname = ConvName(prefix, i, "weight");
    nn::Conv1dGrad g = nn::Conv1dBackwardCols(
        trace.cols[i], p.arrays[wname], cfg.temporal_kernel, dy, i > 0);
    (*grads)[wname] += g.dweight;
    (*grads)[ConvName(prefix, i, "bias")] += g.dbias;
    if (i > 0) dy = std::move(g.dx);
  }
}

Matrix StackPredictions(const FeatureSequence& f, const FrameLabelSequence& y) {
  if (y.frames() != f.frames()) {
    throw ShapeError("frame predictions do not match feature length");
  }
  Matrix x(f.channels() + 1, f.frames());
  x.topRows(f.channels()) = f.data();
  x.row(f.channels()) = y.values().transpose();
  return x;
}

BoundaryMap SigmoidMap(const Matrix& logits) {
  Matrix v = Matrix::Zero(logits.rows(), logits.cols());
  const int T = static_cast<int>(logits.cols());
  for (int d = 0; d < logits.rows(); ++d) {
    for (int t = 0; t + d + 1 <= T; ++t) v(d, t) = nn::Sigmoid(logits(d, t));
  }
  return BoundaryMap(std::move(v));
}

void AddTo(Matrix* dst, const Matrix& src) {
  if (src.size() == 0) return;
  if (dst->size() == 0) {
    *dst = src;
  } else {
    *dst += src;
  }
}

// Back through sigmoid(PooledLinear(x)) for one modality head. Returns dx.
Matrix HeadBackward(const ModelParams& p, Modality m, const Matrix& x,
                    const BoundaryMap& out, const Matrix& d_out,
                    ParamSet* grads) {
  const int D = out.max_duration();
  const int T = out.frames();
  Matrix dlogits = Matrix::Zero(D, T);
  for (int d = 0; d < D; ++d) {
    for (int t = 0; t + d + 1 <= T; ++t) {
      const double s = out(d, t);
      dlogits(d, t) = d_out(d, t) * s * (1.0 - s);
    }
  }
  const std::string wname = HeadName("bm", m, "weight");
  nn::PooledLinearGrad g = nn::PooledLinearBackward(x, p.arrays[wname], dlogits);
  (*grads)[wname] += g.dweight;
  (*grads)[HeadName("bm", m, "bias")] += g.dbias;
  return std::move(g.dx);
}

// Back through the frame classifier. Returns dF.
Matrix ClassifierBackward(const ModelParams& p, Modality m,
                          const FeatureSequence& f, const FrameLabelSequence& y,
                          const Matrix& d_y, ParamSet* grads) {
  Matrix dlogits(1, y.frames());
  for (int t = 0; t < y.frames(); ++t) {
    dlogits(0, t) = d_y(t, 0) * y[t] * (1.0 - y[t]);
  }
  const std::string wname = HeadName("fc", m, "weight");
  nn::Conv1dGrad g = nn::Conv1dBackward(f.data(), p.arrays[wname],
                                        p.config.classifier_kernel, dlogits);
  (*grads)[wname] += g.dweight;
  (*grads)[HeadName("fc", m, "bias")] += g.dbias;
  return std::move(g.dx);
}

}  // namespace

void EncoderConfig::Check() const {
  if (feature_dim <= 0 || temporal_kernel <= 0 || n_layers <= 0 ||
      input_descriptor_dim <= 0) {
    throw Error("encoder dimensions must be positive");
  }
  if (temporal_kernel % 2 == 0) throw Error("temporal kernel must be odd");
}

void ModelConfig::Check() const {
  video.Check();
  audio.Check();
  if (video.feature_dim != audio.feature_dim) {
    throw Error("video and audio feature dimensions must match");
  }
  if (classifier_kernel <= 0 || classifier_kernel % 2 == 0) {
    throw Error("classifier kernel must be odd and positive");
  }
  if (max_duration <= 0) throw Error("max duration must be positive");
}

ModelParams InitParams(const ModelConfig& config, std::uint64_t seed) {
  config.Check();
  ModelParams p;
  p.config = config;
  p.seed = seed;
  std::mt19937_64 rng(seed);
  auto uniform = [&](int rows, int cols, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix m(rows, cols);
    // Fill row-major so the draw order does not depend on storage order.
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
    }
    return m;
  };
  const int C = config.feature_dim();
  const int D = config.max_duration;
  for (Modality m : {Modality::kVideo, Modality::kAudio}) {
    const EncoderConfig& e = EncoderFor(config, m);
    int in = e.input_descriptor_dim;
    for (int i = 0; i < e.n_layers; ++i) {
      const int fan_in = in * e.temporal_kernel;
      p.arrays.Add(ConvName(EncoderPrefix(m), i, "weight"),
                   uniform(e.feature_dim, fan_in, fan_in));
      p.arrays.Add(ConvName(EncoderPrefix(m), i, "bias"),
                   Matrix::Zero(e.feature_dim, 1));
      in = e.feature_dim;
    }
  }
  for (Modality m : {Modality::kVideo, Modality::kAudio}) {
    const int fan_in = C * config.classifier_kernel;
    p.arrays.Add(HeadName("fc", m, "weight"), uniform(1, fan_in, fan_in));
    p.arrays.Add(HeadName("fc", m, "bias"), Matrix::Zero(1, 1));
  }
  for (Modality m : {Modality::kVideo, Modality::kAudio}) {
    p.arrays.Add(HeadName("bm", m, "weight"), uniform(D, C + 1, C + 1));
    p.arrays.Add(HeadName("bm", m, "bias"), Matrix::Zero(D, 1));
  }
  p.arrays.Add(kFusionWeightVideo, uniform(D, 2 * C + 1, 2 * C + 1));
  p.arrays.Add(kFusionBiasVideo, Matrix::Zero(D, 1));
  p.arrays.Add(kFusionWeightAudio, uniform(D, 2 * C + 1, 2 * C + 1));
  p.arrays.Add(kFusionBiasAudio, Matrix::Zero(D, 1));
  return p;
}

FeatureSequence EncodeVideo(const Matrix& descriptors, const ModelParams& p) {
  if (descriptors.rows() != p.config.video.input_descriptor_dim) {
    throw ShapeError("video descriptors have the wrong dimension");
  }
  if (descriptors.cols() < p.config.video.temporal_kernel) {
    throw ShapeError("video shorter than the temporal kernel");
  }
  return FeatureSequence(EncoderForward(descriptors, p, Modality::kVideo, nullptr));
}

FeatureSequence EncodeAudio(const Matrix& spectrogram, int frames,
                            const ModelParams& p) {
  if (spectrogram.cols() != p.config.audio.input_descriptor_dim) {
    throw ShapeError("spectrogram has the wrong number of mel bins");
  }
  if (spectrogram.rows() < frames) {
    throw ShapeError("spectrogram has fewer frames than the video");
  }
  const Matrix h =
      EncoderForward(spectrogram.transpose(), p, Modality::kAudio, nullptr);
  return FeatureSequence(nn::TemporalMaxPool(h, frames).values);
}

FrameLabelSequence ClassifyFrames(const FeatureSequence& f,
                                  const ModelParams& p, Modality m) {
  const Matrix logits =
      nn::Conv1d(f.data(), p.arrays[HeadName("fc", m, "weight")],
                 p.arrays[HeadName("fc", m, "bias")], p.config.classifier_kernel);
  Vector y(f.frames());
  for (int t = 0; t < f.frames(); ++t) y[t] = nn::Sigmoid(logits(0, t));
  return FrameLabelSequence(std::move(y));
}

BoundaryMap PredictBoundaryMap(const FeatureSequence& f,
                               const FrameLabelSequence& frame_preds,
                               const ModelParams& p, Modality m) {
  const Matrix x = StackPredictions(f, frame_preds);
  return SigmoidMap(nn::PooledLinear(x, p.arrays[HeadName("bm", m, "weight")],
                                     p.arrays[HeadName("bm", m, "bias")]));
}

ForwardTrace Forward(const ModelParams& p, const VideoInput& in) {
  const int T = in.frames();
  if (in.descriptors.rows() != p.config.video.input_descriptor_dim ||
      T < p.config.video.temporal_kernel) {
    throw ShapeError("video descriptors do not match the model config");
  }
  if (in.spectrogram.cols() != p.config.audio.input_descriptor_dim ||
      in.spectrogram.rows() < T) {
    throw ShapeError("spectrogram does not match the model config");
  }
  ForwardTrace tr;
  tr.f_v = FeatureSequence(
      EncoderForward(in.descriptors, p, Modality::kVideo, &tr.video_enc));
  const Matrix audio_full = EncoderForward(in.spectrogram.transpose(), p,
                                           Modality::kAudio, &tr.audio_enc);
  tr.audio_enc.pooled_from = static_cast<int>(audio_full.cols());
  tr.audio_enc.pool = nn::TemporalMaxPool(audio_full, T);
  tr.f_a = FeatureSequence(tr.audio_enc.pool.values);

  tr.y_v = ClassifyFrames(tr.f_v, p, Modality::kVideo);
  tr.y_a = ClassifyFrames(tr.f_a, p, Modality::kAudio);

  tr.head_in_v = StackPredictions(tr.f_v, tr.y_v);
  tr.head_in_a = StackPredictions(tr.f_a, tr.y_a);
  tr.m_v = SigmoidMap(nn::PooledLinear(tr.head_in_v, p.arrays["bm_v.weight"],
                                       p.arrays["bm_v.bias"]));
  tr.m_a = SigmoidMap(nn::PooledLinear(tr.head_in_a, p.arrays["bm_a.weight"],
                                       p.arrays["bm_a.bias"]));

  tr.fusion = ProduceWeightsTraced(tr.m_v, tr.m_a, tr.f_v, tr.f_a, p.arrays);
  tr.fused = Fuse(tr.m_v, tr.m_a, tr.fusion.weights);
  return tr;
}

BoundaryMap Infer(const ModelParams& p, const VideoInput& in) {
  return Forward(p, in).fused;
}

void Backward(const ModelParams& p, const VideoInput& in,
              const ForwardTrace& tr, const OutputGrads& dout,
              ParamSet* grads) {
  (void)in;
  const int C = p.config.feature_dim();
  const int D = p.config.max_duration;
  const int T = tr.f_v.frames();

  Matrix d_m_v = Matrix::Zero(D, T);
  Matrix d_m_a = Matrix::Zero(D, T);
  Matrix d_f_v = Matrix::Zero(C, T);
  Matrix d_f_a = Matrix::Zero(C, T);
  Matrix d_y_v = Matrix::Zero(T, 1);
  Matrix d_y_a = Matrix::Zero(T, 1);
  AddTo(&d_m_v, dout.m_v);
  AddTo(&d_m_a, dout.m_a);
  AddTo(&d_f_v, dout.f_v);
  AddTo(&d_f_a, dout.f_a);
  AddTo(&d_y_v, dout.y_v);
  AddTo(&d_y_a, dout.y_a);

  if (dout.fused.size() != 0) {
    const FuseGrad fg =
        FuseBackward(tr.m_v, tr.m_a, tr.fusion.weights, dout.fused);
    d_m_v += fg.d_m_v;
    d_m_a += fg.d_m_a;
    const ProducerGrad pg = ProduceWeightsBackward(
        tr.m_v, tr.m_a, tr.fusion, p.arrays, fg.d_w_v, fg.d_w_a, grads);
    d_m_v += pg.d_m_v;
    d_m_a += pg.d_m_a;
    d_f_v += pg.d_f_v;
    d_f_a += pg.d_f_a;
  }

  const Matrix dx_v =
      HeadBackward(p, Modality::kVideo, tr.head_in_v, tr.m_v, d_m_v, grads);
  const Matrix dx_a =
      HeadBackward(p, Modality::kAudio, tr.head_in_a, tr.m_a, d_m_a, grads);
  d_f_v += dx_v.topRows(C);
  d_f_a += dx_a.topRows(C);
  d_y_v += dx_v.row(C).transpose();
  d_y_a += dx_a.row(C).transpose();

  d_f_v += ClassifierBackward(p, Modality::kVideo, tr.f_v, tr.y_v, d_y_v, grads);
  d_f_a += ClassifierBackward(p, Modality::kAudio, tr.f_a, tr.y_a, d_y_a, grads);

  EncoderBackward(p, Modality::kVideo, tr.video_enc, std::move(d_f_v), grads);
  Matrix d_audio_full =
      nn::TemporalMaxPoolBackward(tr.audio_enc.pool, tr.audio_enc.pooled_from, d_f_a);
  EncoderBackward(p, Modality::kAudio, tr.audio_enc, std::move(d_audio_full), grads);
}

namespace {

json EncoderToJson(const EncoderConfig& e) {
  return {{"feature_dim", e.feature_dim},
          {"temporal_kernel", e.temporal_kernel},
          {"n_layers", e.n_layers},
          {"input_descriptor_dim", e.input_descriptor_dim}};
}

EncoderConfig EncoderFromJson(const json& j) {
  EncoderConfig e;
  e.feature_dim = j.at("feature_dim").get<int>();
  e.temporal_kernel = j.at("temporal_kernel").get<int>();
  e.n_layers = j.at("n_layers").get<int>();
  e.input_descriptor_dim = j.at("input_descriptor_dim").get<int>();
  return e;
}

}  // namespace

void SaveCheckpoint(std::ostream& out, const ModelParams& p) {
  json j;
  j["format"] = "forgeloc-checkpoint";
  j["version"] = 1;
  j["seed"] = p.seed;
  j["config"] = {{"video", EncoderToJson(p.config.video)},
                 {"audio", EncoderToJson(p.config.audio)},
                 {"classifier_kernel", p.config.classifier_kernel},
                 {"max_duration", p.config.max_duration}};
  json arrays = json::array();
  for (const auto& [name, m] : p.arrays) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    }
    arrays.push_back({{"name", name},
                      {"shape", {m.rows(), m.cols()}},
                      {"data", std::move(data)}});
  }
  j["arrays"] = std::move(arrays);
  out << j.dump(1) << '\n';
}

void SaveCheckpointFile(const std::string& path, const ModelParams& p) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint '" + path + "'");
  SaveCheckpoint(out, p);
}

ModelParams LoadCheckpoint(std::istream& in) {
  ModelParams p;
  try {
    const json j = json::parse(in);
    if (j.at("format").get<std::string>() != "forgeloc-checkpoint") {
      throw Error("not a forgeloc checkpoint");
    }
    p.seed = j.at("seed").get<std::uint64_t>();
    const json& c = j.at("config");
    p.config.video = EncoderFromJson(c.at("video"));
    p.config.audio = EncoderFromJson(c.at("audio"));
    p.config.classifier_kernel = c.at("classifier_kernel").get<int>();
    p.config.max_duration = c.at("max_duration").get<int>();
    p.config.Check();
    for (const json& a : j.at("arrays")) {
      const auto shape = a.at("shape").get<std::vector<long>>();
      const auto data = a.at("data").get<std::vector<double>>();
      if (shape.size() != 2 || data.size() != static_cast<std::size_t>(shape[0] * shape[1])) {
        throw Error("checkpoint array '" + a.at("name").get<std::string>() +
                    "' has inconsistent shape");
      }
      Matrix m(shape[0], shape[1]);
      for (long r = 0; r < shape[0]; ++r) {
        for (long col = 0; col < shape[1]; ++col) m(r, col) = data[r * shape[1] + col];
      }
      p.arrays.Add(a.at("name").get<std::string>(), std::move(m));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed checkpoint: ") + e.what());
  }
  // Reject checkpoints whose arrays disagree with their own config.
  const ModelParams reference = InitParams(p.config, p.seed);
  if (reference.arrays.size() != p.arrays.size()) {
    throw Error("checkpoint arrays do not match its config");
  }
  for (const auto& [name, m] : reference.arrays) {
    if (!p.arrays.Contains(name) || p.arrays[name].rows() != m.rows() ||
        p.arrays[name].cols() != m.cols()) {
      throw Error("checkpoint array '" + name + "' missing or misshapen");
    }
  }
  return p;
}

ModelParams LoadCheckpointFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint '" + path + "'");
  return LoadCheckpoint(in);
}

}  // namespace forgeloc
