#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "untangle/param_set.hpp"

namespace untangle {

/// Shape of the transformer pair encoder.
struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t width = 64;  // d
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t ff_width = 128;
  std::size_t max_seq_len = 100;
  double dropout = 0.1;

  std::size_t head_width() const { return width / heads; }
  void validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

struct ModelConfig {
  EncoderConfig encoder;
  std::size_t lstm_hidden = 32;  // k, per direction
  bool use_context = true;       // false: pairs are scored independently
  bool use_features = false;     // add projected pair features to each pair encoding

  /// Width H of each row fed to the heuristic classifier.
  std::size_t aggregate_width() const {
    return use_context ? 2 * lstm_hidden : encoder.width;
  }
  /// Width of the classifier input rows and of its tanh hidden layer.
  std::size_t classifier_width() const { return 4 * aggregate_width(); }

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

struct EncoderLayerSlots {
  std::size_t query, query_bias, key, value, value_bias;
  std::size_t attn_out, attn_out_bias, ln1_gain, ln1_bias;
  std::size_t ff_in, ff_in_bias, ff_out, ff_out_bias, ln2_gain, ln2_bias;
};

struct LstmSlots {
  std::size_t input, recurrent, bias;
};

/// Tensor indices into ModelParams::tensors, resolved once by name.
struct ModelLayout {
  std::size_t token_embedding = 0;
  std::size_t position_embedding = 0;
  std::size_t segment_embedding = 0;
  std::size_t embed_ln_gain = 0, embed_ln_bias = 0;
  std::vector<EncoderLayerSlots> layers;
  LstmSlots forward{}, backward{};
  std::size_t feature_projection = 0;
  std::size_t classifier_weight = 0, classifier_bias = 0, classifier_output = 0;
  std::size_t nsp_weight = 0, nsp_bias = 0, mlm_bias = 0;

  static ModelLayout resolve(const ParamSet& tensors, const ModelConfig& config);
};

/// Every learnable tensor of the pair-encoder / context-aggregator /
/// heuristic-classifier stack plus the post-training heads.
struct ModelParams {
  ModelConfig config;
  ParamSet tensors;
  ModelLayout layout;

  const Matrix& operator[](std::size_t i) const { return tensors[i]; }
  std::size_t num_scalars() const { return tensors.num_scalars(); }
};

/// Randomly initialised parameters; identical seeds give identical tensors.
ModelParams init_model(const ModelConfig& config, std::uint64_t seed);

/// Rebuilds the layout after `tensors` has been loaded or replaced.
ModelParams make_model(const ModelConfig& config, ParamSet tensors);

}  // namespace untangle
