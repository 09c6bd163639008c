// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_PARAM_SET_HPP_
#define FORGELOC_PARAM_SET_HPP_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "forgeloc/types.hpp"

namespace forgeloc {

/// Ordered collection of named real arrays (parameters or their gradients).
class ParamSet {
 public:
  Matrix& Add(const std::string& name, Matrix value);

  bool Contains(const std::string& name) const;
  const Matrix& operator[](const std::string& name) const;
  Matrix& operator[](const std::string& name);

  std::size_t size() const { return entries_.size(); }
  /// Total number of scalars.
  std::size_t NumScalars() const;

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  ParamSet ZerosLike() const;
  /// this += alpha * other (same names and shapes).
  void Axpy(double alpha, const ParamSet& other);
  bool AllFinite() const;

 private:
  std::vector<std::pair<std::string, Matrix>> entries_;
};

}  // namespace forgeloc

#endif  // FORGELOC_PARAM_SET_HPP_
