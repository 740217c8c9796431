#include "untangle/model_config.hpp"

#include <cmath>
#include <random>
#include <string>

#include "untangle/error.hpp"
#include "untangle/features.hpp"

namespace untangle {

namespace {

constexpr double kEmbeddingStd = 0.02;

Matrix normal(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = dist(rng);
  }
  return m;
}

Matrix uniform(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double limit) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = dist(rng);
  }
  return m;
}

Matrix xavier(std::mt19937_64& rng, std::size_t fan_in, std::size_t fan_out) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return uniform(rng, fan_in, fan_out, limit);
}

Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix::Zero(rows, cols); }
Matrix ones(std::size_t rows, std::size_t cols) { return Matrix::Ones(rows, cols); }

void add_lstm(ParamSet& p, std::mt19937_64& rng, const std::string& prefix,
              std::size_t input, std::size_t hidden) {
  const double limit = 1.0 / std::sqrt(static_cast<double>(hidden));
  p.add(prefix + ".input", uniform(rng, input, 4 * hidden, limit));
  p.add(prefix + ".recurrent", uniform(rng, hidden, 4 * hidden, limit));
  Matrix bias = zeros(1, 4 * hidden);
  bias.middleCols(static_cast<Eigen::Index>(hidden), static_cast<Eigen::Index>(hidden)).setOnes();
  p.add(prefix + ".bias", std::move(bias));
}

LstmSlots resolve_lstm(const ParamSet& p, const std::string& prefix) {
  return {p.index_of(prefix + ".input"), p.index_of(prefix + ".recurrent"),
          p.index_of(prefix + ".bias")};
}

}  // namespace

void EncoderConfig::validate() const {
  if (vocab_size <= 5) {
    throw ShapeError("encoder vocab_size must exceed the 5 reserved ids");
  }
  if (width == 0 || heads == 0 || width % heads != 0) {
    throw ShapeError("encoder width " + std::to_string(width) +
                     " must be a positive multiple of heads " + std::to_string(heads));
  }
  if (layers == 0 || ff_width == 0 || max_seq_len == 0) {
    throw ShapeError("encoder layers, ff_width and max_seq_len must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ShapeError("dropout must lie in [0, 1)");
  }
}

void ModelConfig::validate() const {
  encoder.validate();
  if (use_context && lstm_hidden == 0) {
    throw ShapeError("lstm_hidden must be positive");
  }
}

ModelLayout ModelLayout::resolve(const ParamSet& p, const ModelConfig& config) {
  ModelLayout l;
  l.token_embedding = p.index_of("embed.token");
  l.position_embedding = p.index_of("embed.position");
  l.segment_embedding = p.index_of("embed.segment");
  l.embed_ln_gain = p.index_of("embed.ln_gain");
  l.embed_ln_bias = p.index_of("embed.ln_bias");
  for (std::size_t i = 0; i < config.encoder.layers; ++i) {
    const auto pre = "layer" + std::to_string(i) + ".";
    l.layers.push_back({
        p.index_of(pre + "query"), p.index_of(pre + "query_bias"),
        p.index_of(pre + "key"),
        p.index_of(pre + "value"), p.index_of(pre + "value_bias"),
        p.index_of(pre + "attn_out"), p.index_of(pre + "attn_out_bias"),
        p.index_of(pre + "ln1_gain"), p.index_of(pre + "ln1_bias"),
        p.index_of(pre + "ff_in"), p.index_of(pre + "ff_in_bias"),
        p.index_of(pre + "ff_out"), p.index_of(pre + "ff_out_bias"),
        p.index_of(pre + "ln2_gain"), p.index_of(pre + "ln2_bias"),
    });
  }
  if (config.use_context) {
    l.forward = resolve_lstm(p, "lstm_fwd");
    l.backward = resolve_lstm(p, "lstm_bwd");
  }
  if (config.use_features) {
    l.feature_projection = p.index_of("feature.projection");
  }
  l.classifier_weight = p.index_of("classifier.weight");
  l.classifier_bias = p.index_of("classifier.bias");
  l.classifier_output = p.index_of("classifier.output");
  l.nsp_weight = p.index_of("nsp.weight");
  l.nsp_bias = p.index_of("nsp.bias");
  l.mlm_bias = p.index_of("mlm.bias");
  return l;
}

namespace {

ParamSet initial_tensors(const ModelConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& enc = config.encoder;
  const auto d = enc.width;
  ParamSet p;
  p.add("embed.token", normal(rng, enc.vocab_size, d, kEmbeddingStd));
  p.add("embed.position", normal(rng, enc.max_seq_len, d, kEmbeddingStd));
  p.add("embed.segment", normal(rng, 2, d, kEmbeddingStd));
  p.add("embed.ln_gain", ones(1, d));
  p.add("embed.ln_bias", zeros(1, d));
  for (std::size_t i = 0; i < enc.layers; ++i) {
    const auto pre = "layer" + std::to_string(i) + ".";
    p.add(pre + "query", xavier(rng, d, d));
    p.add(pre + "query_bias", zeros(1, d));
    p.add(pre + "key", xavier(rng, d, d));
    p.add(pre + "value", xavier(rng, d, d));
    p.add(pre + "value_bias", zeros(1, d));
    p.add(pre + "attn_out", xavier(rng, d, d));
    p.add(pre + "attn_out_bias", zeros(1, d));
    p.add(pre + "ln1_gain", ones(1, d));
    p.add(pre + "ln1_bias", zeros(1, d));
    p.add(pre + "ff_in", xavier(rng, d, enc.ff_width));
    p.add(pre + "ff_in_bias", zeros(1, enc.ff_width));
    p.add(pre + "ff_out", xavier(rng, enc.ff_width, d));
    p.add(pre + "ff_out_bias", zeros(1, d));
    p.add(pre + "ln2_gain", ones(1, d));
    p.add(pre + "ln2_bias", zeros(1, d));
  }
  if (config.use_context) {
    add_lstm(p, rng, "lstm_fwd", d, config.lstm_hidden);
    add_lstm(p, rng, "lstm_bwd", d, config.lstm_hidden);
  }
  if (config.use_features) {
    p.add("feature.projection", xavier(rng, kNumPairFeatures, d));
  }
  const auto g = config.classifier_width();
  p.add("classifier.weight", xavier(rng, g, g));
  p.add("classifier.bias", zeros(1, g));
  p.add("classifier.output", xavier(rng, g, 1));
  p.add("nsp.weight", zeros(d, 1));
  p.add("nsp.bias", zeros(1, 1));
  p.add("mlm.bias", zeros(1, enc.vocab_size));
  return p;
}

}  // namespace

ModelParams init_model(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  ModelParams m;
  m.config = config;
  m.tensors = initial_tensors(config, seed);
  m.layout = ModelLayout::resolve(m.tensors, config);
  return m;
}

ModelParams make_model(const ModelConfig& config, ParamSet tensors) {
  config.validate();
  const ParamSet expected = initial_tensors(config, 0);
  if (!tensors.same_layout(expected)) {
    throw ShapeError("tensor names or shapes do not match the model configuration");
  }
  ModelParams m;
  m.config = config;
  m.layout = ModelLayout::resolve(tensors, config);
  m.tensors = std::move(tensors);
  return m;
}

}  // namespace untangle
