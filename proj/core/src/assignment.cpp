#include "untangle/assignment.hpp"

#include <algorithm>
#include <limits>

namespace untangle {

std::vector<int> max_weight_assignment(const std::vector<std::vector<std::int64_t>>& weights) {
  const auto rows = weights.size();
  const auto cols = rows == 0 ? std::size_t{0} : weights.front().size();
  const auto n = std::max(rows, cols);
  if (n == 0) {
    return {};
  }
  std::int64_t top = 0;
  for (const auto& r : weights) {
    for (const auto w : r) {
      top = std::max(top, w);
    }
  }
  // Square cost matrix, 1-based for the potential method; padding costs `top`.
  auto cost = [&](std::size_t i, std::size_t j) -> std::int64_t {
    if (i <= rows && j <= cols) {
      return top - weights[i - 1][j - 1];
    }
    return top;
  };

  constexpr auto kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0), way_min(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(way_min.begin(), way_min.end(), kInf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const auto i0 = match[j0];
      std::int64_t delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) {
          continue;
        }
        const auto cur = cost(i0, j) - u[i0] - v[j];
        if (cur < way_min[j]) {
          way_min[j] = cur;
          way[j] = j0;
        }
        if (way_min[j] < delta) {
          delta = way_min[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          way_min[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const auto j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> out(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    const auto i = match[j];
    if (i >= 1 && i <= rows && j <= cols) {
      out[i - 1] = static_cast<int>(j - 1);
    }
  }
  return out;
}

}  // namespace untangle
