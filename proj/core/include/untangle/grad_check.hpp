#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "untangle/param_set.hpp"

namespace untangle {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_offset = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

struct GradCheckOptions {
  double step = 1e-5;
  double fraction = 0.01;  // share of coordinates sampled; 1 checks all
  double min_scale = 1e-8;  // floor of the relative-error denominator
  /// Combine central differences at step and step/2 to cancel the O(h^2)
  /// term, which allows a larger step and so less rounding noise.
  bool richardson = false;
  std::uint64_t seed = 0;
};

/// Compares `analytic` against central differences of `loss` around the
/// current `params`, perturbing coordinates in place and restoring them.
/// Relative error is |a - n| / max(|a|, |n|, min_scale).
GradCheckResult grad_check(ParamSet& params, const std::function<double()>& loss,
                           const ParamSet& analytic, const GradCheckOptions& options = {});

}  // namespace untangle
