#include "untangle/posttrain.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "untangle/context_window.hpp"
#include "untangle/corpus.hpp"
#include "untangle/encoder.hpp"
#include "untangle/error.hpp"
#include "untangle/optimizer.hpp"

namespace untangle {

namespace {

bool is_special(TokenId id) {
  return id == Vocabulary::kCls || id == Vocabulary::kSep || id == Vocabulary::kPad;
}

double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

}  // namespace

MaskedPair mask_tokens(std::span<const TokenId> ids, std::size_t vocab_size,
                       std::mt19937_64& rng, double rate) {
  MaskedPair out;
  out.ids.assign(ids.begin(), ids.end());
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!is_special(ids[i])) {
      candidates.push_back(i);
    }
  }
  if (candidates.empty()) {
    return out;
  }
  auto count = static_cast<std::size_t>(std::lround(rate * static_cast<double>(candidates.size())));
  count = std::clamp<std::size_t>(count, 1, candidates.size());
  std::shuffle(candidates.begin(), candidates.end(), rng);
  candidates.resize(count);
  std::sort(candidates.begin(), candidates.end());

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<TokenId> random_token(
      static_cast<TokenId>(Vocabulary::kNumReserved), static_cast<TokenId>(vocab_size - 1));
  for (const auto pos : candidates) {
    out.targets.emplace_back(pos, ids[pos]);
    const double r = coin(rng);
    if (r < 0.8) {
      out.ids[pos] = Vocabulary::kMask;
    } else if (r < 0.9 && vocab_size > Vocabulary::kNumReserved) {
      out.ids[pos] = random_token(rng);
    }
  }
  return out;
}

PosttrainLoss posttrain_step(const ModelParams& model, const MaskedPair& pair, bool is_next,
                             ParamSet* grads) {
  const auto& l = model.layout;
  const auto& emb = model[l.token_embedding];
  EncoderCache cache;
  const Matrix hidden = encoder_forward(model, pair.ids, grads != nullptr ? &cache : nullptr);
  Matrix d_hidden = Matrix::Zero(hidden.rows(), hidden.cols());

  PosttrainLoss out;
  if (pair.targets.empty()) {
    out.no_masked_positions = true;
  } else {
    const double share = 1.0 / static_cast<double>(pair.targets.size());
    for (const auto& [pos, original] : pair.targets) {
      const auto row = static_cast<Eigen::Index>(pos);
      Vector logits = emb * hidden.row(row).transpose();
      logits += model[l.mlm_bias].row(0).transpose();
      const double top = logits.maxCoeff();
      Vector probs = (logits.array() - top).exp();
      const double z = probs.sum();
      probs /= z;
      out.mlm -= share * (logits(original) - top - std::log(z));
      if (grads != nullptr) {
        Vector d_logits = share * probs;
        d_logits(original) -= share;
        (*grads)[l.mlm_bias].row(0) += d_logits.transpose();
        (*grads)[l.token_embedding] += d_logits * hidden.row(row);
        d_hidden.row(row) += (emb.transpose() * d_logits).transpose();
      }
    }
  }

  const double logit = hidden.row(0).dot(model[l.nsp_weight].col(0)) + model[l.nsp_bias](0, 0);
  out.nsp = is_next ? -log_sigmoid(logit) : -log_sigmoid(-logit);
  out.total = out.mlm + out.nsp;
  if (grads != nullptr) {
    const double d_logit = 1.0 / (1.0 + std::exp(-logit)) - (is_next ? 1.0 : 0.0);
    (*grads)[l.nsp_weight].col(0) += d_logit * hidden.row(0).transpose();
    (*grads)[l.nsp_bias](0, 0) += d_logit;
    d_hidden.row(0) += d_logit * model[l.nsp_weight].col(0).transpose();
    encoder_backward(model, cache, d_hidden, *grads);
  }
  return out;
}

std::vector<double> posttrain(ModelParams& model, std::span<const Channel> channels,
                              const Vocabulary& vocab, const PosttrainConfig& config,
                              std::ostream* log) {
  // Pairs are laid out like the fine-tuning input: reply first, then the
  // candidate it may answer.
  struct Sample {
    std::size_t channel, reply, other;
    bool is_next;
  };
  std::mt19937_64 rng(config.seed);
  std::vector<Sample> samples;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const auto& ch = channels[c];
    const auto& conv = ch.gold_clusters.assignment;
    for (const auto& m : ch.messages) {
      if (m.gold_parent == m.index) {
        continue;
      }
      samples.push_back({c, m.index, m.gold_parent, true});
      std::vector<std::size_t> others;
      for (std::size_t j = 0; j < ch.size(); ++j) {
        if (conv[j] != conv[m.index]) {
          others.push_back(j);
        }
      }
      if (!others.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, others.size() - 1);
        samples.push_back({c, m.index, others[pick(rng)], false});
      }
    }
  }
  if (samples.empty()) {
    throw TrainingError("post-training needs at least one reply with a parent");
  }

  Adam adam(model.tensors, AdamConfig{config.learning_rate});
  ParamSet grads = model.tensors.zeros_like();
  const auto max_len = std::min(config.max_seq_len, model.config.encoder.max_seq_len);
  std::vector<double> epoch_losses;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(samples.begin(), samples.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < samples.size(); start += config.batch_size) {
      const auto end = std::min(samples.size(), start + config.batch_size);
      grads.set_zero();
      for (std::size_t i = start; i < end; ++i) {
        const auto& s = samples[i];
        const auto& ch = channels[s.channel];
        const auto ids = make_pair_tokens(vocab.encode(ch.messages[s.reply].words),
                                          vocab.encode(ch.messages[s.other].words), max_len);
        const auto masked = mask_tokens(ids, model.config.encoder.vocab_size, rng);
        total += posttrain_step(model, masked, s.is_next, &grads).total;
      }
      grads.scale(1.0 / static_cast<double>(end - start));
      adam.step(model.tensors, grads);
    }
    epoch_losses.push_back(total / static_cast<double>(samples.size()));
    if (log != nullptr) {
      *log << "{\"posttrain_epoch\": " << epoch << ", \"loss\": " << std::setprecision(6)
           << epoch_losses.back() << "}\n";
    }
  }
  return epoch_losses;
}

}  // namespace untangle
