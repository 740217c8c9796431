#include "untangle/aggregator.hpp"

#include <cmath>

namespace untangle {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Runs one direction; `reverse` walks rows m-1..0.
Matrix run_direction(const Matrix& x, const Matrix& w_in, const Matrix& w_rec,
                     const Matrix& bias, bool reverse, LstmDirectionCache& c) {
  const auto m = x.rows();
  const auto k = w_rec.rows();
  c.gates.resize(m, 4 * k);
  c.cell.resize(m, k);
  c.cell_tanh.resize(m, k);
  c.hidden.resize(m, k);
  const Matrix projected = x * w_in;
  RowVector h = RowVector::Zero(k);
  RowVector cell = RowVector::Zero(k);
  for (Eigen::Index step = 0; step < m; ++step) {
    const auto t = reverse ? m - 1 - step : step;
    RowVector z = projected.row(t) + h * w_rec + bias.row(0);
    for (Eigen::Index j = 0; j < k; ++j) {
      z(j) = sigmoid(z(j));
      z(k + j) = sigmoid(z(k + j));
      z(2 * k + j) = std::tanh(z(2 * k + j));
      z(3 * k + j) = sigmoid(z(3 * k + j));
    }
    cell = z.segment(k, k).cwiseProduct(cell) + z.segment(0, k).cwiseProduct(z.segment(2 * k, k));
    const RowVector ct = cell.array().tanh();
    h = z.segment(3 * k, k).cwiseProduct(ct);
    c.gates.row(t) = z;
    c.cell.row(t) = cell;
    c.cell_tanh.row(t) = ct;
    c.hidden.row(t) = h;
  }
  return c.hidden;
}

void backward_direction(const Matrix& x, const Matrix& w_in, const Matrix& w_rec,
                        bool reverse, const LstmDirectionCache& c,
                        const Matrix& d_hidden, Matrix& d_in, Matrix& d_rec,
                        Matrix& d_bias, Matrix& d_x) {
  const auto m = x.rows();
  const auto k = w_rec.rows();
  RowVector dh_next = RowVector::Zero(k);
  RowVector dc_next = RowVector::Zero(k);
  Matrix d_z(m, 4 * k);
  for (Eigen::Index step = m; step-- > 0;) {
    const auto t = reverse ? m - 1 - step : step;
    const bool first = step == 0;
    const auto prev = reverse ? t + 1 : t - 1;
    const auto g = c.gates.row(t);
    const RowVector dh = d_hidden.row(t) + dh_next;
    const auto ct = c.cell_tanh.row(t);
    const RowVector d_o = dh.cwiseProduct(ct);
    const RowVector dc = dh.cwiseProduct(g.segment(3 * k, k))
                             .cwiseProduct((1.0 - ct.array().square()).matrix()) +
                         dc_next;
    const RowVector c_prev = first ? RowVector::Zero(k) : RowVector(c.cell.row(prev));
    const RowVector d_i = dc.cwiseProduct(g.segment(2 * k, k));
    const RowVector d_g = dc.cwiseProduct(g.segment(0, k));
    const RowVector d_f = dc.cwiseProduct(c_prev);
    dc_next = dc.cwiseProduct(g.segment(k, k));

    auto dz = d_z.row(t);
    for (Eigen::Index j = 0; j < k; ++j) {
      const double i = g(j), f = g(k + j), gg = g(2 * k + j), o = g(3 * k + j);
      dz(j) = d_i(j) * i * (1.0 - i);
      dz(k + j) = d_f(j) * f * (1.0 - f);
      dz(2 * k + j) = d_g(j) * (1.0 - gg * gg);
      dz(3 * k + j) = d_o(j) * o * (1.0 - o);
    }
    if (!first) {
      d_rec += c.hidden.row(prev).transpose() * dz;
    }
    dh_next = dz * w_rec.transpose();
  }
  d_in += x.transpose() * d_z;
  d_bias.row(0) += d_z.colwise().sum();
  d_x += d_z * w_in.transpose();
}

}  // namespace

Matrix context_aggregate(const ModelParams& model, const Matrix& encodings,
                         AggregatorCache* cache) {
  const auto& t = model.tensors;
  const auto& l = model.layout;
  AggregatorCache local;
  AggregatorCache& c = cache != nullptr ? *cache : local;
  const Matrix fwd = run_direction(encodings, t[l.forward.input], t[l.forward.recurrent],
                                   t[l.forward.bias], false, c.forward);
  const Matrix bwd = run_direction(encodings, t[l.backward.input], t[l.backward.recurrent],
                                   t[l.backward.bias], true, c.backward);
  Matrix out(encodings.rows(), fwd.cols() + bwd.cols());
  out << fwd, bwd;
  if (cache != nullptr) {
    c.input = encodings;
  }
  return out;
}

Matrix context_aggregate_backward(const ModelParams& model,
                                  const AggregatorCache& cache,
                                  const Matrix& d_output, ParamSet& grads) {
  const auto& t = model.tensors;
  const auto& l = model.layout;
  const auto k = t[l.forward.recurrent].rows();
  Matrix d_x = Matrix::Zero(cache.input.rows(), cache.input.cols());
  backward_direction(cache.input, t[l.forward.input], t[l.forward.recurrent], false,
                     cache.forward, d_output.leftCols(k), grads[l.forward.input],
                     grads[l.forward.recurrent], grads[l.forward.bias], d_x);
  backward_direction(cache.input, t[l.backward.input], t[l.backward.recurrent], true,
                     cache.backward, d_output.rightCols(k), grads[l.backward.input],
                     grads[l.backward.recurrent], grads[l.backward.bias], d_x);
  return d_x;
}

}  // namespace untangle
