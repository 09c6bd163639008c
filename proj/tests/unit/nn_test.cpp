// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "forgeloc/gradcheck.hpp"
#include "forgeloc/nn.hpp"

namespace forgeloc {
namespace {

Matrix Random(int r, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = n(rng);
  return m;
}

TEST(ActivationTest, StableAtExtremes) {
  EXPECT_DOUBLE_EQ(nn::Sigmoid(0.0), 0.5);
  EXPECT_EQ(nn::Sigmoid(-800.0), 0.0);
  EXPECT_EQ(nn::Sigmoid(800.0), 1.0);
  EXPECT_DOUBLE_EQ(nn::Softplus(800.0), 800.0);
  EXPECT_NEAR(nn::Softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_GT(nn::Softplus(-800.0), -1e-300);
}

TEST(Conv1dTest, MatchesDirectSum) {
  const Matrix x = Random(3, 7, 1);
  const Matrix w = Random(2, 3 * 5, 2);
  const Matrix b = Random(2, 1, 3);
  const Matrix y = nn::Conv1d(x, w, b, 5);
  ASSERT_EQ(y.rows(), 2);
  ASSERT_EQ(y.cols(), 7);
  for (int o = 0; o < 2; ++o) {
    for (int t = 0; t < 7; ++t) {
      double s = b(o, 0);
      for (int k = 0; k < 5; ++k) {
        const int src = t + k - 2;
        if (src < 0 || src >= 7) continue;
        for (int c = 0; c < 3; ++c) s += w(o, k * 3 + c) * x(c, src);
      }
      EXPECT_NEAR(y(o, t), s, 1e-12);
    }
  }
}

TEST(Conv1dTest, BackwardFiniteDifference) {
  Matrix x = Random(3, 6, 4);
  Matrix w = Random(2, 9, 5);
  const Matrix b = Random(2, 1, 6);
  const Matrix dy = Random(2, 6, 7);
  auto f = [&] { return (nn::Conv1d(x, w, b, 3).array() * dy.array()).sum(); };
  const nn::Conv1dGrad g = nn::Conv1dBackward(x, w, 3, dy);
  EXPECT_LT(MaxRelativeError(&x, g.dx, f, 1e-5), 1e-7);
  EXPECT_LT(MaxRelativeError(&w, g.dweight, f, 1e-5), 1e-7);
  EXPECT_NEAR(g.dbias.sum(), dy.sum(), 1e-12);
}

TEST(PoolTest, WindowsCoverInputWithoutGaps) {
  for (int in = 1; in <= 20; ++in) {
    for (int out = 1; out <= in; ++out) {
      int reach = 0;
      for (int j = 0; j < out; ++j) {
        const auto [a, b] = nn::PoolWindow(j, in, out);
        EXPECT_LE(a, reach);
        EXPECT_GT(b, a);
        reach = b;
      }
      EXPECT_EQ(reach, in);
    }
  }
  EXPECT_EQ(nn::PoolWindow(3, 16, 8), std::make_pair(6, 8));
}

TEST(PoolTest, MaxAndBackward) {
  Matrix x(1, 4);
  x << 1.0, 3.0, -1.0, 2.0;
  const nn::MaxPoolResult r = nn::TemporalMaxPool(x, 2);
  EXPECT_EQ(r.values(0, 0), 3.0);
  EXPECT_EQ(r.values(0, 1), 2.0);
  Matrix dy(1, 2);
  dy << 10.0, 20.0;
  const Matrix dx = nn::TemporalMaxPoolBackward(r, 4, dy);
  Matrix want(1, 4);
  want << 0.0, 10.0, 0.0, 20.0;
  EXPECT_EQ(dx, want);
}

TEST(PooledLinearTest, ValuesAndGradients) {
  Matrix x = Random(3, 5, 8);
  Matrix w = Random(2, 3, 9);
  const Matrix b = Random(2, 1, 10);
  const Matrix logits = nn::PooledLinear(x, w, b);
  // Duration row 1 at t = 2 averages frames 2 and 3.
  const double want = w.row(1).dot(0.5 * (x.col(2) + x.col(3))) + b(1, 0);
  EXPECT_NEAR(logits(1, 2), want, 1e-12);
  EXPECT_EQ(logits(1, 4), 0.0);

  const Matrix dl = Random(2, 5, 11);
  Matrix dl_valid = dl;
  dl_valid(1, 4) = 0.0;
  auto f = [&] {
    return (nn::PooledLinear(x, w, b).array() * dl_valid.array()).sum();
  };
  const nn::PooledLinearGrad g = nn::PooledLinearBackward(x, w, dl);
  EXPECT_LT(MaxRelativeError(&x, g.dx, f, 1e-5), 1e-7);
  EXPECT_LT(MaxRelativeError(&w, g.dweight, f, 1e-5), 1e-7);
}

}  // namespace
}  // namespace forgeloc
