// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/gradcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "forgeloc/boundary_map.hpp"
#include "forgeloc/fusion.hpp"
#include "forgeloc/losses.hpp"
#include "forgeloc/model.hpp"
#include "forgeloc/train.hpp"
#include "json.hpp"

namespace forgeloc {

double RelativeError(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

double MaxRelativeError(Matrix* x, const Matrix& analytic,
                        const std::function<double()>& f, double step,
                        const Matrix* mask) {
  if (analytic.rows() != x->rows() || analytic.cols() != x->cols()) {
    throw ShapeError("analytic gradient shape differs from its input");
  }
  double worst = 0.0;
  for (Eigen::Index r = 0; r < x->rows(); ++r) {
    for (Eigen::Index c = 0; c < x->cols(); ++c) {
      if (mask && (*mask)(r, c) == 0.0) continue;
      const double saved = (*x)(r, c);
      (*x)(r, c) = saved + step;
      const double plus = f();
      (*x)(r, c) = saved - step;
      const double minus = f();
      (*x)(r, c) = saved;
      worst = std::max(worst, RelativeError(analytic(r, c), (plus - minus) / (2.0 * step)));
    }
  }
  return worst;
}

namespace {

using Rng = std::mt19937_64;

Matrix Uniform(Rng& rng, int rows, int cols, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

Matrix Gaussian(Rng& rng, int rows, int cols, double sigma) {
  std::normal_distribution<double> n(0.0, sigma);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

int UniformInt(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Random loss inputs. Predictions stay away from the probability clamp and
// feature distances away from the contrastive margin, where the losses are
// not differentiable.
struct LossInstance {
  int t = 0, c = 0, d = 0;
  double delta = 0.99;
  std::vector<Matrix> fv, fa, yv, ya, ty_v, ty_a, m, mv, ma, tm, tmv, tma;
  std::vector<int> pair;
  Matrix mask;
};

LossInstance MakeLossInstance(Rng& rng) {
  LossInstance in;
  const int n = UniformInt(rng, 1, 3);
  in.t = UniformInt(rng, 3, 8);
  in.c = UniformInt(rng, 2, 4);
  in.d = UniformInt(rng, 1, std::min(in.t, 4));
  in.mask = ValidMask(in.d, in.t);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    const int label = UniformInt(rng, 0, 1);
    in.pair.push_back(label);
    Matrix fv = Gaussian(rng, in.c, in.t, 1.0);
    Matrix diff = Gaussian(rng, in.c, in.t, 1.0);
    double dist = u01(rng) < 0.5 ? 0.1 + 0.8 * u01(rng) : 1.1 + 0.8 * u01(rng);
    in.fv.push_back(fv);
    in.fa.push_back(fv + diff * (dist / diff.norm()));
    in.yv.push_back(Uniform(rng, in.t, 1, 0.05, 0.95));
    in.ya.push_back(Uniform(rng, in.t, 1, 0.05, 0.95));
    in.ty_v.push_back(Uniform(rng, in.t, 1, 0.0, 1.0).array().round().matrix());
    in.ty_a.push_back(Uniform(rng, in.t, 1, 0.0, 1.0).array().round().matrix());
    for (auto* v : {&in.m, &in.mv, &in.ma, &in.tm, &in.tmv, &in.tma}) {
      v->push_back(Uniform(rng, in.d, in.t, 0.0, 1.0).cwiseProduct(in.mask));
    }
  }
  return in;
}

std::vector<FeatureSequence> Features(const std::vector<Matrix>& v) {
  std::vector<FeatureSequence> out;
  for (const Matrix& m : v) out.emplace_back(m);
  return out;
}

std::vector<FrameLabelSequence> Labels(const std::vector<Matrix>& v) {
  std::vector<FrameLabelSequence> out;
  for (const Matrix& m : v) out.emplace_back(Vector(m.col(0)));
  return out;
}

std::vector<BoundaryMap> Maps(const std::vector<Matrix>& v) {
  std::vector<BoundaryMap> out;
  for (const Matrix& m : v) out.emplace_back(m);
  return out;
}

LossReport Contrastive(const LossInstance& in) {
  return ContrastiveLoss(Features(in.fv), Features(in.fa), in.pair, in.delta);
}

LossReport Frame(const LossInstance& in) {
  return FrameClassificationLoss(Labels(in.yv), Labels(in.ya), Labels(in.ty_v),
                                 Labels(in.ty_a));
}

LossReport Boundary(const LossInstance& in) {
  return BoundaryLoss(Maps(in.m), Maps(in.tm));
}

LossReport ModalityBoundary(const LossInstance& in) {
  return ModalityBoundaryLoss(Maps(in.mv), Maps(in.ma), Maps(in.tmv), Maps(in.tma));
}

// Compares every gradient of `report` listed in `inputs` against finite
// differences of `loss`.
double CheckReport(LossInstance* in, const std::function<LossReport()>& loss,
                   const std::vector<std::pair<const char*, std::vector<Matrix>*>>& inputs,
                   double step) {
  const LossReport report = loss();
  double worst = 0.0;
  for (const auto& [key, values] : inputs) {
    const std::vector<Matrix>& grads = report.gradients.at(key);
    const bool is_map = values == &in->m || values == &in->mv || values == &in->ma;
    for (std::size_t i = 0; i < values->size(); ++i) {
      worst = std::max(worst, MaxRelativeError(&(*values)[i], grads[i],
                                               [&] { return loss().value; }, step,
                                               is_map ? &in->mask : nullptr));
    }
  }
  return worst;
}

template <typename Fn>
GradCheckResult Timed(const std::string& name, double tolerance, int instances, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  GradCheckResult r;
  r.name = name;
  r.tolerance = tolerance;
  r.instances = instances;
  for (int k = 0; k < instances; ++k) {
    r.max_relative_error = std::max(r.max_relative_error, fn(k));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

double CheckFuse(Rng& rng, double step) {
  const int t = UniformInt(rng, 3, 8);
  const int d = UniformInt(rng, 1, std::min(t, 4));
  const Matrix mask = ValidMask(d, t);
  Matrix mv = Uniform(rng, d, t, 0.0, 1.0).cwiseProduct(mask);
  Matrix ma = Uniform(rng, d, t, 0.0, 1.0).cwiseProduct(mask);
  Matrix wv = Uniform(rng, d, t, 0.1, 2.0).cwiseProduct(mask);
  Matrix wa = Uniform(rng, d, t, 0.1, 2.0).cwiseProduct(mask);
  const Matrix g = Gaussian(rng, d, t, 1.0);
  auto f = [&] {
    return Fuse(BoundaryMap(mv), BoundaryMap(ma), {wv, wa}).values().cwiseProduct(g).sum();
  };
  const FuseGrad grad = FuseBackward(BoundaryMap(mv), BoundaryMap(ma), {wv, wa}, g);
  double worst = 0.0;
  worst = std::max(worst, MaxRelativeError(&mv, grad.d_m_v, f, step, &mask));
  worst = std::max(worst, MaxRelativeError(&ma, grad.d_m_a, f, step, &mask));
  worst = std::max(worst, MaxRelativeError(&wv, grad.d_w_v, f, step, &mask));
  worst = std::max(worst, MaxRelativeError(&wa, grad.d_w_a, f, step, &mask));
  return worst;
}

double CheckProducer(Rng& rng, double step) {
  const int t = UniformInt(rng, 3, 8);
  const int c = UniformInt(rng, 2, 4);
  const int d = UniformInt(rng, 1, std::min(t, 4));
  const Matrix mask = ValidMask(d, t);
  Matrix mv = Uniform(rng, d, t, 0.0, 1.0).cwiseProduct(mask);
  Matrix ma = Uniform(rng, d, t, 0.0, 1.0).cwiseProduct(mask);
  Matrix fv = Gaussian(rng, c, t, 1.0);
  Matrix fa = Gaussian(rng, c, t, 1.0);
  ParamSet params;
  params.Add(kFusionWeightVideo, Gaussian(rng, d, 2 * c + 1, 0.5));
  params.Add(kFusionBiasVideo, Gaussian(rng, d, 1, 0.5));
  params.Add(kFusionWeightAudio, Gaussian(rng, d, 2 * c + 1, 0.5));
  params.Add(kFusionBiasAudio, Gaussian(rng, d, 1, 0.5));
  const Matrix g = Gaussian(rng, d, t, 1.0);

  auto f = [&] {
    const BoundaryMap bv(mv), ba(ma);
    const FusionWeights w =
        ProduceWeights(bv, ba, FeatureSequence(fv), FeatureSequence(fa), params);
    return Fuse(bv, ba, w).values().cwiseProduct(g).sum();
  };
  const BoundaryMap bv(mv), ba(ma);
  const FusionTrace trace =
      ProduceWeightsTraced(bv, ba, FeatureSequence(fv), FeatureSequence(fa), params);
  const FuseGrad fg = FuseBackward(bv, ba, trace.weights, g);
  ParamSet grads = params.ZerosLike();
  const ProducerGrad pg =
      ProduceWeightsBackward(bv, ba, trace, params, fg.d_w_v, fg.d_w_a, &grads);

  double worst = 0.0;
  worst = std::max(worst, MaxRelativeError(&mv, fg.d_m_v + pg.d_m_v, f, step, &mask));
  worst = std::max(worst, MaxRelativeError(&ma, fg.d_m_a + pg.d_m_a, f, step, &mask));
  worst = std::max(worst, MaxRelativeError(&fv, pg.d_f_v, f, step));
  worst = std::max(worst, MaxRelativeError(&fa, pg.d_f_a, f, step));
  for (auto& [name, value] : params) {
    worst = std::max(worst, MaxRelativeError(&value, grads[name], f, step));
  }
  return worst;
}

double CheckModel(Rng& rng, double step) {
  ModelConfig config;
  config.video = {4, 3, 2, 4};
  config.audio = {4, 3, 2, 3};
  config.classifier_kernel = 3;
  config.max_duration = 4;
  const int frames = 8;
  ModelParams p = InitParams(config, rng());
  for (auto& [name, value] : p.arrays) value += Gaussian(rng, value.rows(), value.cols(), 0.1);

  std::vector<VideoInput> inputs;
  std::vector<Targets> targets;
  for (int i = 0; i < 2; ++i) {
    VideoInput in;
    in.descriptors = Gaussian(rng, config.video.input_descriptor_dim, frames, 1.0);
    in.spectrogram = Gaussian(rng, 2 * frames, config.audio.input_descriptor_dim, 1.0);
    inputs.push_back(in);
    VideoAnnotation ann;
    ann.video_id = "g" + std::to_string(i);
    ann.fps = 25.0;
    ann.n_frames = frames;
    ann.duration = frames / ann.fps;
    const int type = UniformInt(rng, 0, 3);
    ann.eta_v = type == 1 || type == 3;
    ann.eta_a = type == 1 || type == 2;
    if (ann.is_fake()) {
      const int len = UniformInt(rng, 1, config.max_duration);
      const int start = UniformInt(rng, 0, frames - len);
      ann.fake_segments.push_back({start / ann.fps, (start + len) / ann.fps, 1.0});
    }
    targets.push_back(MakeTargets(ann, config.max_duration));
  }
  const LossWeights weights;
  const BatchResult analytic = EvaluateBatch(p, inputs, targets, weights, true);
  auto f = [&] { return EvaluateBatch(p, inputs, targets, weights, false).loss; };
  double worst = 0.0;
  for (auto& [name, value] : p.arrays) {
    worst = std::max(worst, MaxRelativeError(&value, analytic.grads[name], f, step));
  }
  return worst;
}

}  // namespace

std::vector<GradCheckResult> RunGradientSuite(const GradCheckOptions& o) {
  const double tol = o.loss_tolerance;
  const double h = o.step;
  std::vector<GradCheckResult> results;
  auto loss_check = [&](const std::string& name, std::uint64_t salt, auto&& body) {
    Rng rng(o.seed * 0x9E3779B97F4A7C15ULL + salt);
    results.push_back(Timed(name, tol, o.instances, [&](int) {
      LossInstance in = MakeLossInstance(rng);
      return body(in, rng);
    }));
  };

  loss_check("contrastive", 1, [&](LossInstance& in, Rng&) {
    return CheckReport(&in, [&] { return Contrastive(in); },
                       {{kGradFeaturesVideo, &in.fv}, {kGradFeaturesAudio, &in.fa}}, h);
  });
  loss_check("frame_classification", 2, [&](LossInstance& in, Rng&) {
    return CheckReport(&in, [&] { return Frame(in); },
                       {{kGradFramesVideo, &in.yv}, {kGradFramesAudio, &in.ya}}, h);
  });
  loss_check("boundary", 3, [&](LossInstance& in, Rng&) {
    return CheckReport(&in, [&] { return Boundary(in); }, {{kGradFusedMap, &in.m}}, h);
  });
  loss_check("modality_boundary", 4, [&](LossInstance& in, Rng&) {
    return CheckReport(&in, [&] { return ModalityBoundary(in); },
                       {{kGradMapVideo, &in.mv}, {kGradMapAudio, &in.ma}}, h);
  });
  loss_check("total", 5, [&](LossInstance& in, Rng& rng) {
    LossWeights w;
    std::uniform_real_distribution<double> u(0.1, 2.0);
    w.lambda_c = u(rng);
    w.lambda_f = u(rng);
    w.lambda_b = u(rng);
    w.lambda_bm = u(rng);
    w.delta = in.delta;
    auto total = [&] {
      return TotalLoss({Contrastive(in), Frame(in), Boundary(in), ModalityBoundary(in)}, w);
    };
    return CheckReport(&in, total,
                       {{kGradFeaturesVideo, &in.fv},
                        {kGradFeaturesAudio, &in.fa},
                        {kGradFramesVideo, &in.yv},
                        {kGradFramesAudio, &in.ya},
                        {kGradFusedMap, &in.m},
                        {kGradMapVideo, &in.mv},
                        {kGradMapAudio, &in.ma}},
                       h);
  });

  {
    Rng rng(o.seed * 0x9E3779B97F4A7C15ULL + 6);
    results.push_back(Timed("fusion", tol, o.instances,
                            [&](int) { return CheckFuse(rng, h); }));
  }
  {
    Rng rng(o.seed * 0x9E3779B97F4A7C15ULL + 7);
    results.push_back(Timed("fusion_producer", tol, o.instances,
                            [&](int) { return CheckProducer(rng, h); }));
  }
  {
    Rng rng(o.seed * 0x9E3779B97F4A7C15ULL + 8);
    results.push_back(Timed("model", o.model_tolerance, o.instances,
                            [&](int) { return CheckModel(rng, h); }));
  }
  return results;
}

std::string GradSuiteToJson(const std::vector<GradCheckResult>& results) {
  nlohmann::json arr = nlohmann::json::array();
  for (const GradCheckResult& r : results) {
    arr.push_back({{"name", r.name},
                   {"instances", r.instances},
                   {"max_relative_error", r.max_relative_error},
                   {"tolerance", r.tolerance},
                   {"passed", r.passed()},
                   {"seconds", r.seconds}});
  }
  return arr.dump(2);
}

}  // namespace forgeloc
