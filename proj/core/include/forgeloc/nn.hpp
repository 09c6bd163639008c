// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

// Differentiable building blocks with hand-written backward passes. All
// sequences are channels x frames.

#ifndef FORGELOC_NN_HPP_
#define FORGELOC_NN_HPP_

#include <utility>
#include <vector>

#include "forgeloc/types.hpp"

namespace forgeloc::nn {

double Sigmoid(double x);
/// log(1 + e^x), computed without overflow.
double Softplus(double x);

/// Zero-padded patches of x: row k * C + c, column t holds x(c, t + k -
/// kernel / 2).
Matrix Im2Col(const Matrix& x, int kernel);

/// Same-padded temporal convolution. `weight` is out x (in * kernel); column
/// k * in + c multiplies channel c at frame offset k - kernel / 2. `bias` is
/// out x 1.
Matrix Conv1d(const Matrix& x, const Matrix& weight, const Matrix& bias,
              int kernel);

struct Conv1dGrad {
  Matrix dx;
  Matrix dweight;
  Matrix dbias;
};

Conv1dGrad Conv1dBackward(const Matrix& x, const Matrix& weight, int kernel,
                          const Matrix& dy);

/// Same, from the forward pass's Im2Col(x, kernel). dx is left empty unless
/// `with_dx`.
Conv1dGrad Conv1dBackwardCols(const Matrix& cols, const Matrix& weight,
                              int kernel, const Matrix& dy, bool with_dx);

/// Frame range [first, last) of output frame j when pooling `in` frames
/// down to `out`. Windows tile the input and reduce to a plain stride of
/// in / out when it divides evenly.
std::pair<int, int> PoolWindow(int j, int in, int out);

struct MaxPoolResult {
  Matrix values;          // channels x out
  std::vector<int> argmax;  // source frame per (c, j), column-major
};

/// Temporal max-pooling from x.cols() frames down to `out` frames.
MaxPoolResult TemporalMaxPool(const Matrix& x, int out);

Matrix TemporalMaxPoolBackward(const MaxPoolResult& forward, int in_frames,
                               const Matrix& dy);

/// Affine map of window-mean pooled features over the D x T proposal grid:
///   logit(d, t) = weight.row(d) . mean(x[:, t .. t+d]) + bias(d)
/// Invalid cells (t + d + 1 > T) are 0. Each duration row has its own
/// weights.
Matrix PooledLinear(const Matrix& x, const Matrix& weight, const Matrix& bias);

struct PooledLinearGrad {
  Matrix dx;
  Matrix dweight;
  Matrix dbias;
};

/// `dlogits` entries on invalid cells are ignored.
PooledLinearGrad PooledLinearBackward(const Matrix& x, const Matrix& weight,
                                      const Matrix& dlogits);

}  // namespace forgeloc::nn

#endif  // FORGELOC_NN_HPP_
