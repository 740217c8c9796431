#pragma once

#include "untangle/model_config.hpp"

namespace untangle {

struct LstmDirectionCache {
  Matrix gates;      // m x 4k, activated: input, forget, candidate, output
  Matrix cell;       // m x k
  Matrix cell_tanh;  // m x k
  Matrix hidden;     // m x k
};

struct AggregatorCache {
  Matrix input;
  LstmDirectionCache forward, backward;
};

/// Single-layer bidirectional LSTM over the slot sequence. Row i of the
/// result is [forward state at i, backward state at i], width 2k.
Matrix context_aggregate(const ModelParams& model, const Matrix& encodings,
                         AggregatorCache* cache = nullptr);

/// Returns dL/d(encodings) and accumulates weight gradients.
Matrix context_aggregate_backward(const ModelParams& model,
                                  const AggregatorCache& cache,
                                  const Matrix& d_output, ParamSet& grads);

}  // namespace untangle
