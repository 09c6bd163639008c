// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_GRADCHECK_HPP_
#define FORGELOC_GRADCHECK_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "forgeloc/types.hpp"

namespace forgeloc {

/// |a - n| / max(|a|, |n|, 1e-6).
double RelativeError(double analytic, double numeric);

/// Central-difference derivative of f() with respect to every entry of *x
/// where `mask` (if given) is nonzero; returns the largest RelativeError
/// against `analytic`. *x is restored on return.
double MaxRelativeError(Matrix* x, const Matrix& analytic,
                        const std::function<double()>& f, double step,
                        const Matrix* mask = nullptr);

struct GradCheckOptions {
  std::uint64_t seed = 0;
  int instances = 20;
  double step = 1e-5;
  double loss_tolerance = 1e-4;
  double model_tolerance = 1e-3;
};

struct GradCheckResult {
  std::string name;
  int instances = 0;
  double max_relative_error = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;

  bool passed() const { return max_relative_error <= tolerance; }
};

/// Finite-difference checks of every loss, the total loss, the fusion
/// average, the fusion weight producer and the full model on seeded random
/// instances.
std::vector<GradCheckResult> RunGradientSuite(const GradCheckOptions& options);

std::string GradSuiteToJson(const std::vector<GradCheckResult>& results);

}  // namespace forgeloc

#endif  // FORGELOC_GRADCHECK_HPP_
