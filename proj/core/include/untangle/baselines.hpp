#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "untangle/classifier.hpp"
#include "untangle/features.hpp"
#include "untangle/param_set.hpp"

namespace untangle {

struct PairBatch;

enum class BaselineKind { kLinear, kFeedforward };

std::string_view to_string(BaselineKind kind);
BaselineKind parse_baseline_kind(std::string_view text);

/// Feature-based candidate rankers. Linear: logit = w . phi ("weight", 15 x 1).
/// Feedforward: logit = v . tanh(phi W + b) ("hidden", "hidden_bias",
/// "output"), 64 hidden units by default.
struct BaselineModel {
  BaselineKind kind = BaselineKind::kLinear;
  ParamSet tensors;
};

inline constexpr std::size_t kFeedforwardHidden = 64;

BaselineModel init_linear();
BaselineModel init_feedforward(std::uint64_t seed, std::size_t hidden = kFeedforwardHidden);

/// Masked softmax over w . phi. Throws ShapeError when `weights` is not a
/// 15-entry column or the row count differs from the mask.
Scores linear_rank(const Matrix& weights, const std::vector<FeatureVector>& features,
                   const std::vector<bool>& valid_mask);

Scores feedforward_rank(const ParamSet& params, const std::vector<FeatureVector>& features,
                        const std::vector<bool>& valid_mask);

Scores baseline_rank(const BaselineModel& model, const std::vector<FeatureVector>& features,
                     const std::vector<bool>& valid_mask);

/// Loss of the baseline's distribution; accumulates gradients when `grads`
/// is non-null.
LossValues baseline_forward_backward(const BaselineModel& model,
                                     const std::vector<FeatureVector>& features,
                                     const PairBatch& batch, const LossConfig& loss,
                                     ParamSet* grads);

}  // namespace untangle
