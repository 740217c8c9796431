#include "untangle/model.hpp"

#include <cmath>
#include <string>

#include "untangle/aggregator.hpp"
#include "untangle/context_window.hpp"
#include "untangle/encoder.hpp"
#include "untangle/error.hpp"
#include "untangle/features.hpp"

namespace untangle {

namespace {

struct ForwardState {
  std::vector<std::size_t> slots;  // valid slots in slot order
  std::vector<EncoderCache> encoders;
  AggregatorCache aggregator;
  ClassifierCache classifier;
  Scores scores;
};

RowVector feature_row(const FeatureVector& f) {
  RowVector r(static_cast<Eigen::Index>(kNumPairFeatures));
  for (std::size_t i = 0; i < kNumPairFeatures; ++i) {
    r(static_cast<Eigen::Index>(i)) = f[i];
  }
  return r;
}

void check_features(const ModelParams& model, const PairBatch& batch,
                    const std::vector<FeatureVector>* features) {
  if (!model.config.use_features) {
    return;
  }
  if (features == nullptr || features->size() != batch.num_slots()) {
    throw ShapeError("model expects one feature row per slot");
  }
}

void run_forward(const ModelParams& model, const PairBatch& batch,
                 const std::vector<FeatureVector>* features, Dropout& dropout,
                 bool keep_caches, ForwardState& st) {
  check_features(model, batch, features);
  if (batch.num_slots() == 0 || !batch.valid_mask[0]) {
    throw ShapeError("pair batch must have a valid self pair in slot 0");
  }
  for (std::size_t s = 0; s < batch.num_slots(); ++s) {
    if (batch.valid_mask[s]) {
      st.slots.push_back(s);
    }
  }
  const auto m = static_cast<Eigen::Index>(st.slots.size());
  const auto d = static_cast<Eigen::Index>(model.config.encoder.width);
  Matrix encodings(m, d);
  if (keep_caches) {
    st.encoders.resize(st.slots.size());
  }
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto slot = st.slots[static_cast<std::size_t>(r)];
    const Matrix hidden = encoder_forward(
        model, batch.pair_tokens[slot],
        keep_caches ? &st.encoders[static_cast<std::size_t>(r)] : nullptr);
    encodings.row(r) = hidden.row(0);
    if (model.config.use_features) {
      encodings.row(r) += feature_row((*features)[slot]) *
                          model[model.layout.feature_projection];
    }
  }

  Matrix aggregated;
  if (model.config.use_context) {
    aggregated = context_aggregate(model, encodings, keep_caches ? &st.aggregator : nullptr);
  } else {
    aggregated = std::move(encodings);
  }

  const Vector logits = classifier_forward(model, aggregated, dropout,
                                           keep_caches ? &st.classifier : nullptr);
  std::vector<double> full(batch.num_slots(), 0.0);
  for (Eigen::Index r = 0; r < m; ++r) {
    full[st.slots[static_cast<std::size_t>(r)]] = logits(r);
  }
  st.scores = masked_softmax(full, batch.valid_mask);
}

}  // namespace

Scores score_batch(const ModelParams& model, const PairBatch& batch,
                   const std::vector<FeatureVector>* features) {
  ForwardState st;
  Dropout off(0.0, nullptr);
  run_forward(model, batch, features, off, false, st);
  return std::move(st.scores);
}

LossValues forward_backward(const ModelParams& model, const PairBatch& batch,
                            const std::vector<FeatureVector>* features,
                            const LossConfig& loss, ParamSet* grads,
                            std::mt19937_64* dropout_rng) {
  ForwardState st;
  Dropout dropout(model.config.encoder.dropout, dropout_rng);
  run_forward(model, batch, features, dropout, grads != nullptr, st);

  const auto values = conversation_loss(st.scores, batch.parent_slot, batch.conv_labels,
                                        batch.valid_mask, loss);
  if (!std::isfinite(values.total)) {
    throw TrainingError("non-finite loss for batch with target " +
                        std::to_string(batch.target_index));
  }
  if (grads == nullptr) {
    return values;
  }

  const auto d_full = conversation_loss_gradient(st.scores, batch.parent_slot,
                                                 batch.conv_labels, batch.valid_mask, loss);
  const auto m = static_cast<Eigen::Index>(st.slots.size());
  Vector d_logits(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    d_logits(r) = d_full[st.slots[static_cast<std::size_t>(r)]];
  }
  const Matrix d_aggregated = classifier_backward(model, st.classifier, d_logits, *grads);
  const Matrix d_encodings =
      model.config.use_context
          ? context_aggregate_backward(model, st.aggregator, d_aggregated, *grads)
          : d_aggregated;

  const auto d = static_cast<Eigen::Index>(model.config.encoder.width);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto slot = st.slots[static_cast<std::size_t>(r)];
    if (model.config.use_features) {
      (*grads)[model.layout.feature_projection] +=
          feature_row((*features)[slot]).transpose() * d_encodings.row(r);
    }
    const auto& cache = st.encoders[static_cast<std::size_t>(r)];
    Matrix d_hidden = Matrix::Zero(static_cast<Eigen::Index>(cache.ids.size()), d);
    d_hidden.row(0) = d_encodings.row(r);
    encoder_backward(model, cache, d_hidden, *grads);
  }
  return values;
}

}  // namespace untangle
