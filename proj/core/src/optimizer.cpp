#include "untangle/optimizer.hpp"

#include <cmath>

namespace untangle {

double global_norm(const ParamSet& grads) {
  double sq = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    sq += grads[i].squaredNorm();
  }
  return std::sqrt(sq);
}

Adam::Adam(const ParamSet& params, AdamConfig config)
    : config_(config), first_(params.zeros_like()), second_(params.zeros_like()) {}

void Adam::step(ParamSet& params, ParamSet& grads) {
  if (config_.clip_norm > 0.0) {
    const double norm = global_norm(grads);
    if (norm > config_.clip_norm) {
      grads.scale(config_.clip_norm / norm);
    }
  }
  ++steps_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  const double lr = config_.learning_rate;
  for (std::size_t i = 0; i < params.size(); ++i) {
    first_[i] = config_.beta1 * first_[i] + (1.0 - config_.beta1) * grads[i];
    second_[i] = config_.beta2 * second_[i] +
                 (1.0 - config_.beta2) * grads[i].cwiseAbs2();
    params[i].array() -= lr * (first_[i].array() / c1) /
                         ((second_[i].array() / c2).sqrt() + config_.epsilon);
  }
}

}  // namespace untangle
