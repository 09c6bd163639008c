// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FORGELOC_FUSION_HPP_
#define FORGELOC_FUSION_HPP_

#include "forgeloc/boundary_map.hpp"
#include "forgeloc/param_set.hpp"
#include "forgeloc/types.hpp"

namespace forgeloc {

/// Per-cell modality weights, D x T. Strictly positive on valid cells and
/// zero elsewhere.
struct FusionWeights {
  Matrix w_v;
  Matrix w_a;
};

// Parameter names used by the weight producer. For modality m the weight
// matrix is D x (2 C_f + 1): columns [0, C_f) act on the modality's own
// features, [C_f, 2 C_f) on the other modality's features and the last
// column on the modality's own map value.
inline constexpr const char* kFusionWeightVideo = "fusion_v.weight";
inline constexpr const char* kFusionBiasVideo = "fusion_v.bias";
inline constexpr const char* kFusionWeightAudio = "fusion_a.weight";
inline constexpr const char* kFusionBiasAudio = "fusion_a.bias";

/// Cached producer inputs and logits for the backward pass.
struct FusionTrace {
  Matrix x_v, x_a;            // stacked (own ; other) features, 2 C_f x T
  Matrix logits_v, logits_a;  // D x T
  FusionWeights weights;
};

FusionWeights ProduceWeights(const BoundaryMap& m_v, const BoundaryMap& m_a,
                             const FeatureSequence& f_v,
                             const FeatureSequence& f_a, const ParamSet& params);

FusionTrace ProduceWeightsTraced(const BoundaryMap& m_v, const BoundaryMap& m_a,
                                 const FeatureSequence& f_v,
                                 const FeatureSequence& f_a,
                                 const ParamSet& params);

/// Both weights below this at a valid cell: plain mean of the two maps.
inline constexpr double kFuseEpsilon = 1e-12;

/// (W_v M_v + W_a M_a) / (W_v + W_a), element-wise; invalid cells 0.
BoundaryMap Fuse(const BoundaryMap& m_v, const BoundaryMap& m_a,
                 const FusionWeights& w);

struct FuseGrad {
  Matrix d_m_v, d_m_a;
  Matrix d_w_v, d_w_a;
};

FuseGrad FuseBackward(const BoundaryMap& m_v, const BoundaryMap& m_a,
                      const FusionWeights& w, const Matrix& d_fused);

struct ProducerGrad {
  Matrix d_m_v, d_m_a;  // through the map-value column
  Matrix d_f_v, d_f_a;  // C_f x T
};

/// Back-propagates weight gradients through the producer. Parameter
/// gradients are added to `grads` under the names above.
ProducerGrad ProduceWeightsBackward(const BoundaryMap& m_v,
                                    const BoundaryMap& m_a,
                                    const FusionTrace& trace,
                                    const ParamSet& params,
                                    const Matrix& d_w_v, const Matrix& d_w_a,
                                    ParamSet* grads);

}  // namespace forgeloc

#endif  // FORGELOC_FUSION_HPP_
