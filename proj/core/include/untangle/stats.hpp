#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "untangle/corpus.hpp"

namespace untangle {

struct CorpusStats {
  std::size_t channels = 0;
  std::size_t messages = 0;
  std::size_t conversations = 0;  // gold self-links
  std::size_t speakers = 0;       // distinct non-system speakers
  /// distance_counts[d] counts replies whose parent is d lines back
  /// (1 <= d < size); longer links land in `beyond`.
  std::vector<std::size_t> distance_counts;
  std::size_t beyond = 0;
  std::size_t context_range = 0;
  std::size_t within_range = 0;  // messages whose parent sits in the window (self-links included)

  double within_range_fraction() const;
};

/// Gold-structure statistics; distances up to `max_distance` are histogrammed.
CorpusStats corpus_stats(std::span<const Channel> channels, std::size_t context_range,
                         std::size_t max_distance = 100);

/// Human-readable summary plus "distance count" histogram rows.
void write_stats(std::ostream& out, const CorpusStats& stats);

}  // namespace untangle
