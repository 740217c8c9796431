#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "untangle/model_config.hpp"

namespace untangle {

/// Probability over candidate slots. Padded slots hold exactly zero.
struct Scores {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
};

/// Softmax over the slots where `valid` is true; logits has one entry per slot.
Scores masked_softmax(const std::vector<double>& logits, const std::vector<bool>& valid);

/// Draws inverted-dropout masks; a null generator or zero rate disables dropout.
class Dropout {
 public:
  Dropout(double rate, std::mt19937_64* rng) : rate_(rate), rng_(rng) {}
  bool active() const { return rng_ != nullptr && rate_ > 0.0; }
  Matrix mask(Eigen::Index rows, Eigen::Index cols);

 private:
  double rate_;
  std::mt19937_64* rng_;
};

struct ClassifierCache {
  Matrix features;  // F after dropout, m x H
  Matrix combined;  // G, m x 4H
  Matrix hidden;    // tanh output before dropout
  Matrix hidden_mask;
  Matrix feature_mask;
};

/// Logits for m compacted rows. Row 0 of `aggregated` is the pivot f0; each row
/// i is scored from [f0, fi, f0*fi, f0-fi] through a tanh layer and a scalar
/// output projection.
Vector classifier_forward(const ModelParams& model, const Matrix& aggregated,
                          Dropout& dropout, ClassifierCache* cache);

/// Returns dL/d(aggregated) given dL/d(logits).
Matrix classifier_backward(const ModelParams& model, const ClassifierCache& cache,
                           const Vector& d_logits, ParamSet& grads);

/// Scores for a full T-row matrix F; rows of invalid slots are ignored.
/// Throws ShapeError when no slot is valid or slot 0 is not.
Scores heuristic_score(const ModelParams& model, const Matrix& aggregated,
                       const std::vector<bool>& valid_mask);

struct LossConfig {
  double alpha = 0.1;     // weight of the conversation term
  double epsilon = 1e-12;  // probability floor inside logarithms
};

struct LossValues {
  double total = 0.0;
  double ce = 0.0;  // -log P[parent]
  double cv = 0.0;  // conversation term, averaged over all slots
};

/// ce + alpha * cv with cv = -(1/T) sum_i y_i log max(P_i, eps) over valid
/// slots. Throws DataError when `parent_slot` is not a valid slot.
LossValues conversation_loss(const Scores& scores, std::size_t parent_slot,
                             const std::vector<bool>& conv_labels,
                             const std::vector<bool>& valid_mask,
                             const LossConfig& config);

/// dL/d(logit) per slot for the loss above (zero on invalid slots).
std::vector<double> conversation_loss_gradient(const Scores& scores, std::size_t parent_slot,
                                               const std::vector<bool>& conv_labels,
                                               const std::vector<bool>& valid_mask,
                                               const LossConfig& config);

/// Highest-probability slot; exact ties go to the most recent candidate in
/// `order` (see recency_order).
std::size_t select_slot(const Scores& scores, const std::vector<bool>& valid_mask,
                        const std::vector<std::size_t>& order);

}  // namespace untangle
