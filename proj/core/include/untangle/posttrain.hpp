#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "untangle/model_config.hpp"
#include "untangle/vocabulary.hpp"

namespace untangle {

struct Channel;

/// A [cls] a [sep] b [sep] sequence after masking, with the original ids of
/// the masked positions.
struct MaskedPair {
  std::vector<TokenId> ids;
  std::vector<std::pair<std::size_t, TokenId>> targets;  // (position, original id)
};

/// Selects round(rate * n) of the n non-special positions (at least one when
/// n > 0). Each selected token becomes [mask] with probability 0.8, a random
/// regular token with 0.1, and stays unchanged otherwise.
MaskedPair mask_tokens(std::span<const TokenId> ids, std::size_t vocab_size,
                       std::mt19937_64& rng, double rate = 0.15);

struct PosttrainLoss {
  double total = 0.0;
  double mlm = 0.0;
  double nsp = 0.0;
  bool no_masked_positions = false;
};

/// Masked-token cross-entropy through the tied token embedding (plus an output
/// bias) averaged over masked positions, and binary cross-entropy of the
/// is-next prediction read from the [cls] state. total = mlm + nsp.
/// Accumulates gradients when `grads` is non-null.
PosttrainLoss posttrain_step(const ModelParams& model, const MaskedPair& pair, bool is_next,
                             ParamSet* grads);

struct PosttrainConfig {
  std::size_t epochs = 1;
  double learning_rate = 1e-3;
  std::size_t batch_size = 8;
  std::uint64_t seed = 1;
  std::size_t max_seq_len = 100;
};

/// Continued pre-training on channel text: each reply is paired with its gold
/// parent (is-next) and with a random message from another conversation
/// (not next). Returns the mean total loss per epoch.
std::vector<double> posttrain(ModelParams& model, std::span<const Channel> channels,
                              const Vocabulary& vocab, const PosttrainConfig& config,
                              std::ostream* log = nullptr);

}  // namespace untangle
