// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/nn.hpp"

#include <algorithm>
#include <cmath>

namespace forgeloc::nn {
namespace {

// Column prefix sums: p(:, i) = sum_{j < i} x(:, j).
Matrix PrefixSums(const Matrix& x) {
  Matrix p(x.rows(), x.cols() + 1);
  p.col(0).setZero();
  for (Eigen::Index j = 0; j < x.cols(); ++j) p.col(j + 1) = p.col(j) + x.col(j);
  return p;
}

}  // namespace

Matrix Im2Col(const Matrix& x, int kernel) {
  const int C = static_cast<int>(x.rows());
  const int T = static_cast<int>(x.cols());
  const int half = kernel / 2;
  Matrix cols(static_cast<Eigen::Index>(C) * kernel, T);
  for (int k = 0; k < kernel; ++k) {
    const int shift = k - half;
    const Eigen::Index row = static_cast<Eigen::Index>(k) * C;
    // cols(k*C + c, t) = x(c, t + shift), zero outside [0, T).
    const int t0 = std::clamp(-shift, 0, T);
    const int t1 = std::clamp(T - shift, t0, T);
    cols.block(row, 0, C, t0).setZero();
    cols.block(row, t0, C, t1 - t0) = x.block(0, t0 + shift, C, t1 - t0);
    cols.block(row, t1, C, T - t1).setZero();
  }
  return cols;
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

Matrix Conv1d(const Matrix& x, const Matrix& weight, const Matrix& bias,
              int kernel) {
  if (kernel <= 0 || kernel % 2 == 0) throw Error("conv kernel must be odd");
  if (weight.cols() != x.rows() * kernel || bias.rows() != weight.rows() ||
      bias.cols() != 1) {
    throw ShapeError("conv1d: weight/bias shape does not match input");
  }
  Matrix y = weight * Im2Col(x, kernel);
  y.colwise() += bias.col(0);
  return y;
}

Conv1dGrad Conv1dBackward(const Matrix& x, const Matrix& weight, int kernel,
                          const Matrix& dy) {
  return Conv1dBackwardCols(Im2Col(x, kernel), weight, kernel, dy, true);
}

Conv1dGrad Conv1dBackwardCols(const Matrix& cols, const Matrix& weight,
                              int kernel, const Matrix& dy, bool with_dx) {
  const int C = static_cast<int>(cols.rows()) / kernel;
  const int T = static_cast<int>(cols.cols());
  const int half = kernel / 2;
  Conv1dGrad g;
  g.dweight.noalias() = dy * cols.transpose();
  g.dbias = dy.rowwise().sum();
  if (!with_dx) return g;
  Matrix dcols;
  dcols.noalias() = weight.transpose() * dy;
  g.dx = Matrix::Zero(C, T);
  for (int k = 0; k < kernel; ++k) {
    const int shift = k - half;
    const int t0 = std::max(0, -shift);
    const int t1 = std::min(T, T - shift);
    if (t1 > t0) {
      g.dx.block(0, t0 + shift, C, t1 - t0) +=
          dcols.block(static_cast<Eigen::Index>(k) * C, t0, C, t1 - t0);
    }
  }
  return g;
}

std::pair<int, int> PoolWindow(int j, int in, int out) {
  const long first = static_cast<long>(j) * in / out;
  const long last = (static_cast<long>(j + 1) * in + out - 1) / out;
  return {static_cast<int>(first), static_cast<int>(last)};
}

MaxPoolResult TemporalMaxPool(const Matrix& x, int out) {
  const int in = static_cast<int>(x.cols());
  if (out <= 0 || in < out) {
    throw ShapeError("temporal max-pool: input has fewer frames than output");
  }
  const int C = static_cast<int>(x.rows());
  MaxPoolResult r;
  r.values.resize(C, out);
  r.argmax.resize(static_cast<std::size_t>(C) * out);
  for (int j = 0; j < out; ++j) {
    const auto [first, last] = PoolWindow(j, in, out);
    for (int c = 0; c < C; ++c) {
      int best = first;
      for (int s = first + 1; s < last; ++s) {
        if (x(c, s) > x(c, best)) best = s;
      }
      r.values(c, j) = x(c, best);
      r.argmax[static_cast<std::size_t>(j) * C + c] = best;
    }
  }
  return r;
}

Matrix TemporalMaxPoolBackward(const MaxPoolResult& forward, int in_frames,
                               const Matrix& dy) {
  const int C = static_cast<int>(dy.rows());
  const int out = static_cast<int>(dy.cols());
  Matrix dx = Matrix::Zero(C, in_frames);
  for (int j = 0; j < out; ++j) {
    for (int c = 0; c < C; ++c) {
      dx(c, forward.argmax[static_cast<std::size_t>(j) * C + c]) += dy(c, j);
    }
  }
  return dx;
}

Matrix PooledLinear(const Matrix& x, const Matrix& weight, const Matrix& bias) {
  if (weight.cols() != x.rows() || bias.rows() != weight.rows() ||
      bias.cols() != 1) {
    throw ShapeError("pooled linear: weight/bias shape does not match input");
  }
  const int D = static_cast<int>(weight.rows());
  const int T = static_cast<int>(x.cols());
  const Matrix q = weight * PrefixSums(x);  // D x (T + 1)
  Matrix logits = Matrix::Zero(D, T);
  for (int d = 0; d < D; ++d) {
    const double inv = 1.0 / (d + 1);
    for (int t = 0; t + d + 1 <= T; ++t) {
      logits(d, t) = (q(d, t + d + 1) - q(d, t)) * inv + bias(d, 0);
    }
  }
  return logits;
}

PooledLinearGrad PooledLinearBackward(const Matrix& x, const Matrix& weight,
                                      const Matrix& dlogits) {
  const int D = static_cast<int>(weight.rows());
  const int T = static_cast<int>(x.cols());
  Matrix h = Matrix::Zero(D, T + 1);
  PooledLinearGrad g;
  g.dbias = Matrix::Zero(D, 1);
  for (int d = 0; d < D; ++d) {
    const double inv = 1.0 / (d + 1);
    for (int t = 0; t + d + 1 <= T; ++t) {
      const double v = dlogits(d, t);
      g.dbias(d, 0) += v;
      h(d, t + d + 1) += v * inv;
      h(d, t) -= v * inv;
    }
  }
  g.dweight = h * PrefixSums(x).transpose();
  const Matrix dp = weight.transpose() * h;  // C x (T + 1)
  g.dx.resize(x.rows(), T);
  // p(:, i) sums x(:, j) for j < i, so dx(:, j) = sum_{i > j} dp(:, i).
  Vector acc = Vector::Zero(x.rows());
  for (int j = T - 1; j >= 0; --j) {
    acc += dp.col(j + 1);
    g.dx.col(j) = acc;
  }
  return g;
}

}  // namespace forgeloc::nn
