#pragma once

#include <random>
#include <span>
#include <vector>

#include "untangle/classifier.hpp"
#include "untangle/model_config.hpp"

namespace untangle {

struct PairBatch;
struct FeatureVector;

/// Evaluation-mode candidate distribution for one target (no dropout).
/// `features` is required when the model was built with use_features.
Scores score_batch(const ModelParams& model, const PairBatch& batch,
                   const std::vector<FeatureVector>* features = nullptr);

/// Forward pass plus loss; when `grads` is non-null the gradient of the total
/// loss is accumulated into it. A non-null `dropout_rng` enables dropout on
/// the aggregator output and the classifier hidden layer.
///
/// Throws DataError for a batch whose parent slot is unusable and
/// TrainingError for a non-finite loss.
LossValues forward_backward(const ModelParams& model, const PairBatch& batch,
                            const std::vector<FeatureVector>* features,
                            const LossConfig& loss, ParamSet* grads,
                            std::mt19937_64* dropout_rng = nullptr);

}  // namespace untangle
