#pragma once

#include <span>
#include <vector>

#include "untangle/model_config.hpp"
#include "untangle/vocabulary.hpp"

namespace untangle {

/// Activations kept from a forward pass for the backward pass.
struct LayerNormCache {
  Matrix normalized;  // (x - mean) / std, per row
  Vector inv_std;
};

struct EncoderLayerCache {
  Matrix input;
  Matrix query, key, value;
  std::vector<Matrix> attention;  // one row-stochastic n x n matrix per head
  Matrix context;                 // concatenated head outputs
  LayerNormCache ln1;
  Matrix mid;  // output of the first layer norm
  Matrix ff_pre;
  Matrix ff_act;
  LayerNormCache ln2;
};

struct EncoderCache {
  std::vector<TokenId> ids;
  std::vector<int> segments;
  LayerNormCache embed_ln;
  std::vector<EncoderLayerCache> layers;
};

/// 0 up to and including the first [sep], 1 afterwards.
std::vector<int> segment_ids(std::span<const TokenId> ids);

/// Post-norm transformer over one token sequence: token, position and segment
/// embeddings summed and layer-normalized, then per layer
/// multi-head self-attention and a GELU feedforward block, each wrapped in a
/// residual connection followed by layer normalization. Returns n x d hidden
/// states. Throws ShapeError for out-of-vocabulary ids or over-long input.
Matrix encoder_forward(const ModelParams& model, std::span<const TokenId> ids,
                       EncoderCache* cache);

/// Accumulates parameter gradients into `grads` given dL/d(hidden states).
void encoder_backward(const ModelParams& model, const EncoderCache& cache,
                      const Matrix& d_hidden, ParamSet& grads);

/// Hidden state at the [cls] position.
Vector encode_pair(const ModelParams& model, std::span<const TokenId> pair_tokens);

}  // namespace untangle
