#pragma once

#include <cstdint>
#include <vector>

namespace untangle {

/// Maximum-weight assignment on a rows x cols weight matrix (rectangular
/// allowed). Returns, for each row, the matched column or -1. Hungarian
/// algorithm with potentials, O(n^3) in the larger dimension.
std::vector<int> max_weight_assignment(const std::vector<std::vector<std::int64_t>>& weights);

}  // namespace untangle
