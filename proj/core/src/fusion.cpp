// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/fusion.hpp"

#include "forgeloc/nn.hpp"

namespace forgeloc {
namespace {

void CheckShapes(const BoundaryMap& m_v, const BoundaryMap& m_a,
                 const FeatureSequence& f_v, const FeatureSequence& f_a) {
  if (m_v.max_duration() != m_a.max_duration() || m_v.frames() != m_a.frames()) {
    throw ShapeError("fusion: modality maps differ in shape");
  }
  if (f_v.channels() != f_a.channels() || f_v.frames() != f_a.frames() ||
      f_v.frames() != m_v.frames()) {
    throw ShapeError("fusion: features do not match the maps");
  }
}

Matrix Stack(const Matrix& own, const Matrix& other) {
  Matrix x(own.rows() + other.rows(), own.cols());
  x << own, other;
  return x;
}

Matrix ProducerLogits(const Matrix& x, const BoundaryMap& own_map,
                      const Matrix& weight, const Matrix& bias) {
  const Eigen::Index C2 = x.rows();
  if (weight.cols() != C2 + 1 || weight.rows() != own_map.max_duration()) {
    throw ShapeError("fusion: producer weight shape mismatch");
  }
  Matrix logits = nn::PooledLinear(x, weight.leftCols(C2), bias);
  for (int d = 0; d < own_map.max_duration(); ++d) {
    for (int t = 0; own_map.valid(d, t); ++t) {
      logits(d, t) += weight(d, C2) * own_map(d, t);
    }
  }
  return logits;
}

Matrix Softplus(const Matrix& logits) {
  Matrix w = Matrix::Zero(logits.rows(), logits.cols());
  const int T = static_cast<int>(logits.cols());
  for (int d = 0; d < logits.rows(); ++d) {
    for (int t = 0; t + d + 1 <= T; ++t) w(d, t) = nn::Softplus(logits(d, t));
  }
  return w;
}

// Returns d(own map) and d(stacked features); adds parameter gradients.
std::pair<Matrix, Matrix> ProducerBackward(const Matrix& x,
                                           const BoundaryMap& own_map,
                                           const Matrix& logits,
                                           const Matrix& weight,
                                           const Matrix& d_w, Matrix* dweight,
                                           Matrix* dbias) {
  const Eigen::Index C2 = x.rows();
  const int D = own_map.max_duration();
  const int T = own_map.frames();
  Matrix dlogits = Matrix::Zero(D, T);
  Matrix d_map = Matrix::Zero(D, T);
  Matrix du = Matrix::Zero(D, 1);
  for (int d = 0; d < D; ++d) {
    for (int t = 0; t + d + 1 <= T; ++t) {
      const double g = d_w(d, t) * nn::Sigmoid(logits(d, t));
      dlogits(d, t) = g;
      d_map(d, t) = g * weight(d, C2);
      du(d, 0) += g * own_map(d, t);
    }
  }
  nn::PooledLinearGrad pg =
      nn::PooledLinearBackward(x, weight.leftCols(C2), dlogits);
  dweight->leftCols(C2) += pg.dweight;
  dweight->col(C2) += du.col(0);
  *dbias += pg.dbias;
  return {std::move(d_map), std::move(pg.dx)};
}

}  // namespace

FusionTrace ProduceWeightsTraced(const BoundaryMap& m_v, const BoundaryMap& m_a,
                                 const FeatureSequence& f_v,
                                 const FeatureSequence& f_a,
                                 const ParamSet& params) {
  CheckShapes(m_v, m_a, f_v, f_a);
  FusionTrace tr;
  tr.x_v = Stack(f_v.data(), f_a.data());
  tr.x_a = Stack(f_a.data(), f_v.data());
  tr.logits_v = ProducerLogits(tr.x_v, m_v, params[kFusionWeightVideo],
                               params[kFusionBiasVideo]);
  tr.logits_a = ProducerLogits(tr.x_a, m_a, params[kFusionWeightAudio],
                               params[kFusionBiasAudio]);
  tr.weights.w_v = Softplus(tr.logits_v);
  tr.weights.w_a = Softplus(tr.logits_a);
  return tr;
}

FusionWeights ProduceWeights(const BoundaryMap& m_v, const BoundaryMap& m_a,
                             const FeatureSequence& f_v,
                             const FeatureSequence& f_a,
                             const ParamSet& params) {
  return ProduceWeightsTraced(m_v, m_a, f_v, f_a, params).weights;
}

BoundaryMap Fuse(const BoundaryMap& m_v, const BoundaryMap& m_a,
                 const FusionWeights& w) {
  const int D = m_v.max_duration();
  const int T = m_v.frames();
  if (m_a.max_duration() != D || m_a.frames() != T || w.w_v.rows() != D ||
      w.w_v.cols() != T || w.w_a.rows() != D || w.w_a.cols() != T) {
    throw ShapeError("fuse: map and weight shapes differ");
  }
  Matrix out = Matrix::Zero(D, T);
  for (int d = 0; d < D; ++d) {
    for (int t = 0; t + d + 1 <= T; ++t) {
      const double wv = w.w_v(d, t);
      const double wa = w.w_a(d, t);
      if (wv < kFuseEpsilon && wa < kFuseEpsilon) {
        out(d, t) = 0.5 * (m_v(d, t) + m_a(d, t));
      } else {
        out(d, t) = (wv * m_v(d, t) + wa * m_a(d, t)) / (wv + wa);
      }
    }
  }
  return BoundaryMap(std::move(out));
}

FuseGrad FuseBackward(const BoundaryMap& m_v, const BoundaryMap& m_a,
                      const FusionWeights& w, const Matrix& d_fused) {
  const int D = m_v.max_duration();
  const int T = m_v.frames();
  FuseGrad g;
  g.d_m_v = Matrix::Zero(D, T);
  g.d_m_a = Matrix::Zero(D, T);
  g.d_w_v = Matrix::Zero(D, T);
  g.d_w_a = Matrix::Zero(D, T);
  for (int d = 0; d < D; ++d) {
    for (int t = 0; t + d + 1 <= T; ++t) {
      const double wv = w.w_v(d, t);
      const double wa = w.w_a(d, t);
      const double up = d_fused(d, t);
      if (wv < kFuseEpsilon && wa < kFuseEpsilon) {
        g.d_m_v(d, t) = 0.5 * up;
        g.d_m_a(d, t) = 0.5 * up;
        continue;
      }
      const double s = wv + wa;
      const double fused = (wv * m_v(d, t) + wa * m_a(d, t)) / s;
      g.d_m_v(d, t) = up * wv / s;
      g.d_m_a(d, t) = up * wa / s;
      g.d_w_v(d, t) = up * (m_v(d, t) - fused) / s;
      g.d_w_a(d, t) = up * (m_a(d, t) - fused) / s;
    }
  }
  return g;
}

ProducerGrad ProduceWeightsBackward(const BoundaryMap& m_v,
                                    const BoundaryMap& m_a,
                                    const FusionTrace& trace,
                                    const ParamSet& params,
                                    const Matrix& d_w_v, const Matrix& d_w_a,
                                    ParamSet* grads) {
  const Eigen::Index C = trace.x_v.rows() / 2;
  ProducerGrad g;
  auto [dmv, dxv] = ProducerBackward(
      trace.x_v, m_v, trace.logits_v, params[kFusionWeightVideo], d_w_v,
      &(*grads)[kFusionWeightVideo], &(*grads)[kFusionBiasVideo]);
  auto [dma, dxa] = ProducerBackward(
      trace.x_a, m_a, trace.logits_a, params[kFusionWeightAudio], d_w_a,
      &(*grads)[kFusionWeightAudio], &(*grads)[kFusionBiasAudio]);
  g.d_m_v = std::move(dmv);
  g.d_m_a = std::move(dma);
  // x_v = (F_v ; F_a), x_a = (F_a ; F_v)
  g.d_f_v = dxv.topRows(C) + dxa.bottomRows(C);
  g.d_f_a = dxv.bottomRows(C) + dxa.topRows(C);
  return g;
}

}  // namespace forgeloc
