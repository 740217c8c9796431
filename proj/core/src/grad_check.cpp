#include "untangle/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "untangle/error.hpp"

namespace untangle {

GradCheckResult grad_check(ParamSet& params, const std::function<double()>& loss,
                           const ParamSet& analytic, const GradCheckOptions& options) {
  if (!params.same_layout(analytic)) {
    throw ShapeError("grad_check: gradient layout differs from parameters");
  }
  const auto total = params.num_scalars();
  std::vector<std::size_t> coords(total);
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (options.fraction < 1.0) {
    std::mt19937_64 rng(options.seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(options.fraction * static_cast<double>(total))));
    coords.resize(std::min(keep, total));
    std::sort(coords.begin(), coords.end());
  }

  // Flat offset -> (tensor, local offset) for reporting.
  std::vector<std::size_t> starts;
  std::size_t acc = 0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    starts.push_back(acc);
    acc += static_cast<std::size_t>(params[t].size());
  }

  ParamSet flat_analytic = analytic;  // scalar() needs a mutable set
  GradCheckResult result;
  for (const auto flat : coords) {
    double& theta = params.scalar(flat);
    const double saved = theta;
    auto central = [&](double h) {
      theta = saved + h;
      const double plus = loss();
      theta = saved - h;
      const double minus = loss();
      theta = saved;
      return (plus - minus) / (2.0 * h);
    };
    const double numeric =
        options.richardson
            ? (4.0 * central(0.5 * options.step) - central(options.step)) / 3.0
            : central(options.step);
    const double exact = flat_analytic.scalar(flat);
    const double denom = std::max({std::abs(exact), std::abs(numeric), options.min_scale});
    const double err = std::abs(exact - numeric) / denom;
    ++result.checked;
    if (err > result.max_relative_error || result.checked == 1) {
      const auto t = static_cast<std::size_t>(
          std::upper_bound(starts.begin(), starts.end(), flat) - starts.begin() - 1);
      result.max_relative_error = err;
      result.worst_tensor = params.name(t);
      result.worst_offset = flat - starts[t];
      result.worst_analytic = exact;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

}  // namespace untangle
