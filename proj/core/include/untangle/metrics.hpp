#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>

#include "untangle/clustering.hpp"

namespace untangle {

struct Channel;

/// 100 * (1 - VI / log2 n), VI = H(pred) + H(gold) - 2 I(pred, gold) in bits.
/// Requires n >= 2; throws ShapeError when the partitions cover different n.
double scaled_vi(const Clustering& pred, const Clustering& gold);

/// Adjusted Rand index times 100, in [-100, 100].
double ari(const Clustering& pred, const Clustering& gold);

/// 100 * (mass of the best one-to-one cluster matching) / n.
double one_to_one(const Clustering& pred, const Clustering& gold);

/// Raw counts behind the exact-match scores; singleton clusters are excluded.
struct ExactMatchCounts {
  std::size_t correct = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;

  ExactMatchCounts& operator+=(const ExactMatchCounts& o) {
    correct += o.correct;
    predicted += o.predicted;
    gold += o.gold;
    return *this;
  }
};

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool empty_denominator = false;  // some ratio had nothing to count
};

ExactMatchCounts exact_match_counts(const Clustering& pred, const Clustering& gold);
PrecisionRecall prf_from_counts(const ExactMatchCounts& counts);
PrecisionRecall exact_match_prf(const Clustering& pred, const Clustering& gold);

/// The six scores on a 0-100 scale (ARI may be negative).
struct MetricsReport {
  double scaled_vi = 0.0;
  double ari = 0.0;
  double one_to_one = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t messages = 0;
  ExactMatchCounts counts;
};

MetricsReport evaluate_clustering(const Clustering& pred, const Clustering& gold);

/// Message-weighted average of VI, ARI and 1-1 across channels; P/R/F1 from
/// pooled exact-match counts. `preds[i]` pairs with `gold[i]`.
MetricsReport evaluate(std::span<const Clustering> preds, std::span<const Clustering> gold);

/// Aligned two-line table with the column headers VI ARI 1-1 F1 P R.
void write_report_table(std::ostream& out, const MetricsReport& report);
/// "VI=92.60" style lines, one per score.
void write_report_keyvalue(std::ostream& out, const MetricsReport& report);

}  // namespace untangle
