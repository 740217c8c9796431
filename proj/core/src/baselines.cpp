#include "untangle/baselines.hpp"

#include <cmath>
#include <random>
#include <string>

#include "untangle/context_window.hpp"
#include "untangle/error.hpp"

namespace untangle {

namespace {

Matrix feature_matrix(const std::vector<FeatureVector>& features) {
  Matrix x(static_cast<Eigen::Index>(features.size()),
           static_cast<Eigen::Index>(kNumPairFeatures));
  for (std::size_t r = 0; r < features.size(); ++r) {
    for (std::size_t c = 0; c < kNumPairFeatures; ++c) {
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = features[r][c];
    }
  }
  return x;
}

void check_rows(const std::vector<FeatureVector>& features, const std::vector<bool>& valid) {
  if (features.size() != valid.size()) {
    throw ShapeError("baseline: " + std::to_string(features.size()) + " feature rows for " +
                     std::to_string(valid.size()) + " slots");
  }
}

std::vector<double> to_vector(const Vector& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

std::string_view to_string(BaselineKind kind) {
  return kind == BaselineKind::kLinear ? "linear" : "feedforward";
}

BaselineKind parse_baseline_kind(std::string_view text) {
  if (text == "linear") {
    return BaselineKind::kLinear;
  }
  if (text == "feedforward") {
    return BaselineKind::kFeedforward;
  }
  throw ParseError("unknown baseline kind \"" + std::string(text) + "\"");
}

BaselineModel init_linear() {
  BaselineModel m;
  m.kind = BaselineKind::kLinear;
  m.tensors.add("weight", Matrix::Zero(kNumPairFeatures, 1));
  return m;
}

BaselineModel init_feedforward(std::uint64_t seed, std::size_t hidden) {
  std::mt19937_64 rng(seed);
  const double limit = std::sqrt(6.0 / static_cast<double>(kNumPairFeatures + hidden));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix w(kNumPairFeatures, hidden);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w.data()[i] = dist(rng);
  }
  Matrix v(hidden, 1);
  const double out_limit = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  std::uniform_real_distribution<double> out_dist(-out_limit, out_limit);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v.data()[i] = out_dist(rng);
  }
  BaselineModel m;
  m.kind = BaselineKind::kFeedforward;
  m.tensors.add("hidden", std::move(w));
  m.tensors.add("hidden_bias", Matrix::Zero(1, hidden));
  m.tensors.add("output", std::move(v));
  return m;
}

Scores linear_rank(const Matrix& weights, const std::vector<FeatureVector>& features,
                   const std::vector<bool>& valid_mask) {
  if (weights.rows() != static_cast<Eigen::Index>(kNumPairFeatures) || weights.cols() != 1) {
    throw ShapeError("linear_rank: weights must be a " + std::to_string(kNumPairFeatures) +
                     " x 1 column");
  }
  check_rows(features, valid_mask);
  return masked_softmax(to_vector(feature_matrix(features) * weights), valid_mask);
}

Scores feedforward_rank(const ParamSet& params, const std::vector<FeatureVector>& features,
                        const std::vector<bool>& valid_mask) {
  const auto& w = params.at("hidden");
  if (w.rows() != static_cast<Eigen::Index>(kNumPairFeatures)) {
    throw ShapeError("feedforward_rank: hidden weights expect " +
                     std::to_string(kNumPairFeatures) + " features");
  }
  check_rows(features, valid_mask);
  Matrix h = feature_matrix(features) * w;
  h.rowwise() += params.at("hidden_bias").row(0);
  h = h.array().tanh();
  return masked_softmax(to_vector(h * params.at("output")), valid_mask);
}

Scores baseline_rank(const BaselineModel& model, const std::vector<FeatureVector>& features,
                     const std::vector<bool>& valid_mask) {
  if (model.kind == BaselineKind::kLinear) {
    return linear_rank(model.tensors.at("weight"), features, valid_mask);
  }
  return feedforward_rank(model.tensors, features, valid_mask);
}

LossValues baseline_forward_backward(const BaselineModel& model,
                                     const std::vector<FeatureVector>& features,
                                     const PairBatch& batch, const LossConfig& loss,
                                     ParamSet* grads) {
  const auto scores = baseline_rank(model, features, batch.valid_mask);
  const auto values = conversation_loss(scores, batch.parent_slot, batch.conv_labels,
                                        batch.valid_mask, loss);
  if (grads == nullptr) {
    return values;
  }
  const auto d = conversation_loss_gradient(scores, batch.parent_slot, batch.conv_labels,
                                            batch.valid_mask, loss);
  const Vector d_logits = Eigen::Map<const Vector>(d.data(), static_cast<Eigen::Index>(d.size()));
  const Matrix x = feature_matrix(features);
  if (model.kind == BaselineKind::kLinear) {
    grads->at("weight") += x.transpose() * d_logits;
    return values;
  }
  const auto& p = model.tensors;
  Matrix h = x * p.at("hidden");
  h.rowwise() += p.at("hidden_bias").row(0);
  h = h.array().tanh();
  grads->at("output") += h.transpose() * d_logits;
  const Matrix d_pre =
      (d_logits * p.at("output").transpose()).array() * (1.0 - h.array().square());
  grads->at("hidden") += x.transpose() * d_pre;
  grads->at("hidden_bias").row(0) += d_pre.colwise().sum();
  return values;
}

}  // namespace untangle
