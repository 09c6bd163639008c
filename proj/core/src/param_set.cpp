// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#include "forgeloc/param_set.hpp"

#include <algorithm>

namespace forgeloc {

Matrix& ParamSet::Add(const std::string& name, Matrix value) {
  if (Contains(name)) throw Error("duplicate parameter '" + name + "'");
  entries_.emplace_back(name, std::move(value));
  return entries_.back().second;
}

bool ParamSet::Contains(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.first == name; });
}

const Matrix& ParamSet::operator[](const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.first == name) return e.second;
  }
  throw Error("unknown parameter '" + name + "'");
}

Matrix& ParamSet::operator[](const std::string& name) {
  for (auto& e : entries_) {
    if (e.first == name) return e.second;
  }
  throw Error("unknown parameter '" + name + "'");
}

std::size_t ParamSet::NumScalars() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += static_cast<std::size_t>(e.second.size());
  return n;
}

ParamSet ParamSet::ZerosLike() const {
  ParamSet out;
  for (const auto& [name, m] : entries_) {
    out.Add(name, Matrix::Zero(m.rows(), m.cols()));
  }
  return out;
}

void ParamSet::Axpy(double alpha, const ParamSet& other) {
  if (other.size() != size()) throw ShapeError("parameter sets differ");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& [name, m] = other.entries_[i];
    if (name != entries_[i].first || m.rows() != entries_[i].second.rows() ||
        m.cols() != entries_[i].second.cols()) {
      throw ShapeError("parameter sets differ at '" + name + "'");
    }
    entries_[i].second += alpha * m;
  }
}

bool ParamSet::AllFinite() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const auto& e) { return e.second.allFinite(); });
}

}  // namespace forgeloc
