#include "untangle/encoder.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "untangle/error.hpp"

namespace untangle {

namespace {

constexpr double kLayerNormEps = 1e-12;

Matrix add_bias(Matrix m, const Matrix& bias) {
  m.rowwise() += bias.row(0);
  return m;
}

Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias,
                  LayerNormCache* cache) {
  const auto n = x.rows();
  const auto d = static_cast<double>(x.cols());
  Matrix normalized(n, x.cols());
  Vector inv_std(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = x.row(i).mean();
    const RowVector centered = x.row(i).array() - mean;
    const double var = centered.squaredNorm() / d;
    inv_std(i) = 1.0 / std::sqrt(var + kLayerNormEps);
    normalized.row(i) = centered * inv_std(i);
  }
  Matrix out = normalized.array().rowwise() * gain.row(0).array();
  out.rowwise() += bias.row(0);
  if (cache != nullptr) {
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
  }
  return out;
}

Matrix layer_norm_backward(const LayerNormCache& cache, const Matrix& d_out,
                           const Matrix& gain, Matrix& d_gain, Matrix& d_bias) {
  d_gain.row(0) += (d_out.array() * cache.normalized.array()).colwise().sum().matrix();
  d_bias.row(0) += d_out.colwise().sum();
  const Matrix d_norm = d_out.array().rowwise() * gain.row(0).array();
  const auto d = static_cast<double>(d_out.cols());
  Matrix d_x(d_out.rows(), d_out.cols());
  for (Eigen::Index i = 0; i < d_out.rows(); ++i) {
    const double mean_d = d_norm.row(i).sum() / d;
    const double mean_dx = d_norm.row(i).dot(cache.normalized.row(i)) / d;
    d_x.row(i) = cache.inv_std(i) *
                 (d_norm.row(i).array() - mean_d -
                  cache.normalized.row(i).array() * mean_dx).matrix();
  }
  return d_x;
}

double gelu(double x) {
  return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2));
}

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

void softmax_rows(Matrix& s) {
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double top = s.row(i).maxCoeff();
    s.row(i) = (s.row(i).array() - top).exp();
    s.row(i) /= s.row(i).sum();
  }
}

Matrix layer_forward(const ModelParams& model, const EncoderLayerSlots& w,
                     const Matrix& x, EncoderLayerCache* cache) {
  const auto& t = model.tensors;
  const auto heads = static_cast<Eigen::Index>(model.config.encoder.heads);
  const auto dh = static_cast<Eigen::Index>(model.config.encoder.head_width());
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Matrix q = add_bias(x * t[w.query], t[w.query_bias]);
  // No key bias: it would shift every score in a row equally.
  Matrix k = x * t[w.key];
  Matrix v = add_bias(x * t[w.value], t[w.value_bias]);
  Matrix context(x.rows(), x.cols());
  std::vector<Matrix> attention;
  attention.reserve(static_cast<std::size_t>(heads));
  for (Eigen::Index h = 0; h < heads; ++h) {
    Matrix a = q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose() * scale;
    softmax_rows(a);
    context.middleCols(h * dh, dh) = a * v.middleCols(h * dh, dh);
    attention.push_back(std::move(a));
  }
  const Matrix residual1 = x + add_bias(context * t[w.attn_out], t[w.attn_out_bias]);
  LayerNormCache ln1;
  Matrix mid = layer_norm(residual1, t[w.ln1_gain], t[w.ln1_bias], &ln1);

  Matrix ff_pre = add_bias(mid * t[w.ff_in], t[w.ff_in_bias]);
  Matrix ff_act = ff_pre.unaryExpr(&gelu);
  const Matrix residual2 = mid + add_bias(ff_act * t[w.ff_out], t[w.ff_out_bias]);
  LayerNormCache ln2;
  Matrix out = layer_norm(residual2, t[w.ln2_gain], t[w.ln2_bias], &ln2);

  if (cache != nullptr) {
    cache->input = x;
    cache->query = std::move(q);
    cache->key = std::move(k);
    cache->value = std::move(v);
    cache->attention = std::move(attention);
    cache->context = std::move(context);
    cache->ln1 = std::move(ln1);
    cache->mid = std::move(mid);
    cache->ff_pre = std::move(ff_pre);
    cache->ff_act = std::move(ff_act);
    cache->ln2 = std::move(ln2);
  }
  return out;
}

Matrix layer_backward(const ModelParams& model, const EncoderLayerSlots& w,
                      const EncoderLayerCache& c, const Matrix& d_out, ParamSet& g) {
  const auto& t = model.tensors;
  const auto heads = static_cast<Eigen::Index>(model.config.encoder.heads);
  const auto dh = static_cast<Eigen::Index>(model.config.encoder.head_width());
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  const Matrix d_res2 = layer_norm_backward(c.ln2, d_out, t[w.ln2_gain],
                                            g[w.ln2_gain], g[w.ln2_bias]);
  g[w.ff_out] += c.ff_act.transpose() * d_res2;
  g[w.ff_out_bias].row(0) += d_res2.colwise().sum();
  const Matrix d_act = d_res2 * t[w.ff_out].transpose();
  const Matrix d_pre = d_act.array() * c.ff_pre.unaryExpr(&gelu_grad).array();
  g[w.ff_in] += c.mid.transpose() * d_pre;
  g[w.ff_in_bias].row(0) += d_pre.colwise().sum();
  const Matrix d_mid = d_res2 + d_pre * t[w.ff_in].transpose();

  const Matrix d_res1 = layer_norm_backward(c.ln1, d_mid, t[w.ln1_gain],
                                            g[w.ln1_gain], g[w.ln1_bias]);
  g[w.attn_out] += c.context.transpose() * d_res1;
  g[w.attn_out_bias].row(0) += d_res1.colwise().sum();
  const Matrix d_context = d_res1 * t[w.attn_out].transpose();

  Matrix d_q(c.query.rows(), c.query.cols());
  Matrix d_k(c.key.rows(), c.key.cols());
  Matrix d_v(c.value.rows(), c.value.cols());
  for (Eigen::Index h = 0; h < heads; ++h) {
    const auto& a = c.attention[static_cast<std::size_t>(h)];
    const auto d_ctx_h = d_context.middleCols(h * dh, dh);
    const Matrix d_a = d_ctx_h * c.value.middleCols(h * dh, dh).transpose();
    d_v.middleCols(h * dh, dh) = a.transpose() * d_ctx_h;
    const Vector row_dot = (d_a.array() * a.array()).rowwise().sum();
    Matrix d_s = a.array() * (d_a.colwise() - row_dot).array();
    d_s *= scale;
    d_q.middleCols(h * dh, dh) = d_s * c.key.middleCols(h * dh, dh);
    d_k.middleCols(h * dh, dh) = d_s.transpose() * c.query.middleCols(h * dh, dh);
  }
  g[w.query] += c.input.transpose() * d_q;
  g[w.query_bias].row(0) += d_q.colwise().sum();
  g[w.key] += c.input.transpose() * d_k;
  g[w.value] += c.input.transpose() * d_v;
  g[w.value_bias].row(0) += d_v.colwise().sum();
  return d_res1 + d_q * t[w.query].transpose() + d_k * t[w.key].transpose() +
         d_v * t[w.value].transpose();
}

}  // namespace

std::vector<int> segment_ids(std::span<const TokenId> ids) {
  std::vector<int> out(ids.size(), 0);
  bool second = false;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out[i] = second ? 1 : 0;
    if (ids[i] == Vocabulary::kSep) {
      second = true;
    }
  }
  return out;
}

Matrix encoder_forward(const ModelParams& model, std::span<const TokenId> ids,
                       EncoderCache* cache) {
  const auto& cfg = model.config.encoder;
  if (ids.empty()) {
    throw ShapeError("encoder input is empty");
  }
  if (ids.size() > cfg.max_seq_len) {
    throw ShapeError("encoder input of " + std::to_string(ids.size()) +
                     " tokens exceeds max_seq_len " + std::to_string(cfg.max_seq_len));
  }
  const auto& tok = model[model.layout.token_embedding];
  const auto& pos = model[model.layout.position_embedding];
  const auto& seg = model[model.layout.segment_embedding];
  const auto n = static_cast<Eigen::Index>(ids.size());
  Matrix x(n, static_cast<Eigen::Index>(cfg.width));
  const auto segments = segment_ids(ids);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto id = ids[static_cast<std::size_t>(i)];
    if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab_size) {
      throw ShapeError("token id " + std::to_string(id) + " outside vocabulary of " +
                       std::to_string(cfg.vocab_size));
    }
    x.row(i) = tok.row(id) + pos.row(i) + seg.row(segments[static_cast<std::size_t>(i)]);
  }
  if (cache != nullptr) {
    cache->ids.assign(ids.begin(), ids.end());
    cache->segments = segments;
    cache->layers.resize(model.layout.layers.size());
  }
  x = layer_norm(x, model[model.layout.embed_ln_gain], model[model.layout.embed_ln_bias],
                 cache != nullptr ? &cache->embed_ln : nullptr);
  for (std::size_t l = 0; l < model.layout.layers.size(); ++l) {
    x = layer_forward(model, model.layout.layers[l], x,
                      cache != nullptr ? &cache->layers[l] : nullptr);
  }
  return x;
}

void encoder_backward(const ModelParams& model, const EncoderCache& cache,
                      const Matrix& d_hidden, ParamSet& grads) {
  Matrix d = d_hidden;
  for (std::size_t l = model.layout.layers.size(); l-- > 0;) {
    d = layer_backward(model, model.layout.layers[l], cache.layers[l], d, grads);
  }
  d = layer_norm_backward(cache.embed_ln, d, model[model.layout.embed_ln_gain],
                          grads[model.layout.embed_ln_gain], grads[model.layout.embed_ln_bias]);
  auto& d_tok = grads[model.layout.token_embedding];
  auto& d_pos = grads[model.layout.position_embedding];
  auto& d_seg = grads[model.layout.segment_embedding];
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    const auto at = static_cast<std::size_t>(i);
    d_tok.row(cache.ids[at]) += d.row(i);
    d_pos.row(i) += d.row(i);
    d_seg.row(cache.segments[at]) += d.row(i);
  }
}

Vector encode_pair(const ModelParams& model, std::span<const TokenId> pair_tokens) {
  if (pair_tokens.empty() || pair_tokens.front() != Vocabulary::kCls) {
    throw ShapeError("pair tokens must begin with [cls]");
  }
  return encoder_forward(model, pair_tokens, nullptr).row(0).transpose();
}

}  // namespace untangle
