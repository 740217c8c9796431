#include "untangle/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "untangle/error.hpp"

namespace untangle {

Scores masked_softmax(const std::vector<double>& logits, const std::vector<bool>& valid) {
  if (logits.size() != valid.size()) {
    throw ShapeError("masked_softmax: logits and mask lengths differ");
  }
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (valid[i]) {
      top = std::max(top, logits[i]);
    }
  }
  if (!std::isfinite(top)) {
    throw ShapeError("masked_softmax: no valid slot");
  }
  Scores s;
  s.probs.assign(logits.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (valid[i]) {
      s.probs[i] = std::exp(logits[i] - top);
      sum += s.probs[i];
    }
  }
  for (auto& p : s.probs) {
    p /= sum;
  }
  return s;
}

Matrix Dropout::mask(Eigen::Index rows, Eigen::Index cols) {
  if (!active()) {
    return Matrix::Ones(rows, cols);
  }
  std::bernoulli_distribution keep(1.0 - rate_);
  const double scale = 1.0 / (1.0 - rate_);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = keep(*rng_) ? scale : 0.0;
  }
  return m;
}

Vector classifier_forward(const ModelParams& model, const Matrix& aggregated,
                          Dropout& dropout, ClassifierCache* cache) {
  const auto& t = model.tensors;
  const auto& l = model.layout;
  const auto m = aggregated.rows();
  const auto h = aggregated.cols();

  Matrix feature_mask = dropout.mask(m, h);
  const Matrix f = aggregated.cwiseProduct(feature_mask);
  const RowVector pivot = f.row(0);
  Matrix g(m, 4 * h);
  g.leftCols(h).rowwise() = pivot;
  g.middleCols(h, h) = f;
  g.middleCols(2 * h, h) = f.array().rowwise() * pivot.array();
  g.rightCols(h) = (-f).rowwise() + pivot;

  Matrix hidden = g * t[l.classifier_weight];
  hidden.rowwise() += t[l.classifier_bias].row(0);
  hidden = hidden.array().tanh();
  Matrix hidden_mask = dropout.mask(m, hidden.cols());
  const Vector logits = hidden.cwiseProduct(hidden_mask) * t[l.classifier_output];

  if (cache != nullptr) {
    cache->features = f;
    cache->combined = std::move(g);
    cache->hidden = std::move(hidden);
    cache->hidden_mask = std::move(hidden_mask);
    cache->feature_mask = std::move(feature_mask);
  }
  return logits;
}

Matrix classifier_backward(const ModelParams& model, const ClassifierCache& c,
                           const Vector& d_logits, ParamSet& grads) {
  const auto& t = model.tensors;
  const auto& l = model.layout;
  const auto h = c.features.cols();

  const Matrix dropped = c.hidden.cwiseProduct(c.hidden_mask);
  grads[l.classifier_output] += dropped.transpose() * d_logits;
  Matrix d_hidden = d_logits * t[l.classifier_output].transpose();
  d_hidden = d_hidden.cwiseProduct(c.hidden_mask);
  const Matrix d_pre = d_hidden.array() * (1.0 - c.hidden.array().square());
  grads[l.classifier_weight] += c.combined.transpose() * d_pre;
  grads[l.classifier_bias].row(0) += d_pre.colwise().sum();
  const Matrix d_g = d_pre * t[l.classifier_weight].transpose();

  const RowVector pivot = c.features.row(0);
  const auto d_t = d_g.leftCols(h);
  const auto d_c = d_g.middleCols(h, h);
  const auto d_prod = d_g.middleCols(2 * h, h);
  const auto d_diff = d_g.rightCols(h);

  Matrix d_f = d_c + Matrix(d_prod.array().rowwise() * pivot.array()) - d_diff;
  RowVector d_pivot = d_t.colwise().sum() +
                      (d_prod.array() * c.features.array()).colwise().sum().matrix() +
                      d_diff.colwise().sum();
  d_f.row(0) += d_pivot;
  return d_f.cwiseProduct(c.feature_mask);
}

Scores heuristic_score(const ModelParams& model, const Matrix& aggregated,
                       const std::vector<bool>& valid_mask) {
  if (static_cast<std::size_t>(aggregated.rows()) != valid_mask.size()) {
    throw ShapeError("heuristic_score: row count differs from mask length");
  }
  if (valid_mask.empty() || !valid_mask[0]) {
    throw ShapeError("heuristic_score: the pivot slot must be valid");
  }
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < valid_mask.size(); ++i) {
    if (valid_mask[i]) {
      rows.push_back(static_cast<Eigen::Index>(i));
    }
  }
  Matrix compact(static_cast<Eigen::Index>(rows.size()), aggregated.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    compact.row(static_cast<Eigen::Index>(r)) = aggregated.row(rows[r]);
  }
  Dropout off(0.0, nullptr);
  const Vector logits = classifier_forward(model, compact, off, nullptr);
  std::vector<double> full(valid_mask.size(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    full[static_cast<std::size_t>(rows[r])] = logits(static_cast<Eigen::Index>(r));
  }
  return masked_softmax(full, valid_mask);
}

namespace {

void check_loss_inputs(const Scores& scores, std::size_t parent_slot,
                       const std::vector<bool>& conv_labels,
                       const std::vector<bool>& valid_mask) {
  if (scores.size() != valid_mask.size() || conv_labels.size() != valid_mask.size()) {
    throw ShapeError("loss: scores, labels and mask lengths differ");
  }
  if (parent_slot >= valid_mask.size() || !valid_mask[parent_slot]) {
    throw DataError("loss: parent slot " + std::to_string(parent_slot) + " is not valid");
  }
}

}  // namespace

LossValues conversation_loss(const Scores& scores, std::size_t parent_slot,
                             const std::vector<bool>& conv_labels,
                             const std::vector<bool>& valid_mask,
                             const LossConfig& config) {
  check_loss_inputs(scores, parent_slot, conv_labels, valid_mask);
  const double eps = config.epsilon;
  LossValues v;
  v.ce = -std::log(std::max(scores.probs[parent_slot], eps));
  double sum = 0.0;
  for (std::size_t i = 0; i < valid_mask.size(); ++i) {
    if (valid_mask[i] && conv_labels[i]) {
      sum -= std::log(std::max(scores.probs[i], eps));
    }
  }
  v.cv = sum / static_cast<double>(valid_mask.size());
  v.total = v.ce + config.alpha * v.cv;
  return v;
}

std::vector<double> conversation_loss_gradient(const Scores& scores, std::size_t parent_slot,
                                               const std::vector<bool>& conv_labels,
                                               const std::vector<bool>& valid_mask,
                                               const LossConfig& config) {
  check_loss_inputs(scores, parent_slot, conv_labels, valid_mask);
  const auto n = valid_mask.size();
  const auto& p = scores.probs;
  std::vector<double> d(n, 0.0);
  // d(-log P_j)/d(logit_i) = P_i - [i == j], dropped when P_j sits on the floor.
  auto add_term = [&](std::size_t j, double weight) {
    if (p[j] <= config.epsilon) {
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (valid_mask[i]) {
        d[i] += weight * p[i];
      }
    }
    d[j] -= weight;
  };
  add_term(parent_slot, 1.0);
  if (config.alpha != 0.0) {
    const double w = config.alpha / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (valid_mask[j] && conv_labels[j]) {
        add_term(j, w);
      }
    }
  }
  return d;
}

std::size_t select_slot(const Scores& scores, const std::vector<bool>& valid_mask,
                        const std::vector<std::size_t>& order) {
  std::size_t best = order.empty() ? 0 : order.front();
  double best_p = -1.0;
  for (const auto slot : order) {
    if (slot < valid_mask.size() && valid_mask[slot] && scores.probs[slot] > best_p) {
      best_p = scores.probs[slot];
      best = slot;
    }
  }
  return best;
}

}  // namespace untangle
