#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace untangle {

struct Channel;
struct PairBatch;

inline constexpr std::size_t kNumPairFeatures = 15;

/// Feature names in vector order.
///
/// Distances are log1p-scaled and booleans are 0/1. Channel-level context
/// (the corpus year) is constant inside a channel and therefore omitted; the
/// "last 8 messages" flag stands in for conversation frequency.
const std::array<std::string_view, kNumPairFeatures>& feature_schema();

/// Writes the schema with a one-line description per feature.
void write_feature_schema(std::ostream& out);

struct FeatureVector {
  std::array<double, kNumPairFeatures> values{};

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool operator==(const FeatureVector&) const = default;
};

/// Hand-engineered features for the (target, candidate) pair. The candidate may
/// follow the target (future context). Throws DataError on bad indices.
FeatureVector extract_pair_features(const Channel& channel,
                                    std::size_t target_index,
                                    std::size_t candidate_index);

/// One row per slot; padded slots are zero.
std::vector<FeatureVector> featurize_batch(const Channel& channel,
                                           const PairBatch& batch);

}  // namespace untangle
