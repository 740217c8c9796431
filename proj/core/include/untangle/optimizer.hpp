#pragma once

#include <cstddef>

#include "untangle/param_set.hpp"

namespace untangle {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 1.0;  // global gradient-norm clip; <= 0 disables
};

/// Adaptive-moment gradient descent with bias correction.
class Adam {
 public:
  Adam(const ParamSet& params, AdamConfig config);

  /// Applies one update from `grads` (already averaged over the batch).
  void step(ParamSet& params, ParamSet& grads);
  std::size_t steps() const { return steps_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

 private:
  AdamConfig config_;
  ParamSet first_;
  ParamSet second_;
  std::size_t steps_ = 0;
};

double global_norm(const ParamSet& grads);

}  // namespace untangle
