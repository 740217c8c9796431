#include "untangle/metrics.hpp"

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <utility>

#include "untangle/assignment.hpp"
#include "untangle/error.hpp"

namespace untangle {

namespace {

void check_universe(const Clustering& pred, const Clustering& gold) {
  if (pred.size() != gold.size()) {
    throw ShapeError("partitions cover " + std::to_string(pred.size()) + " and " +
                     std::to_string(gold.size()) + " messages");
  }
}

// Sparse contingency table: (pred id, gold id) -> overlap.
std::map<std::pair<int, int>, std::size_t> contingency(const Clustering& pred,
                                                       const Clustering& gold) {
  std::map<std::pair<int, int>, std::size_t> table;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++table[{pred.assignment[i], gold.assignment[i]}];
  }
  return table;
}

std::vector<std::size_t> cluster_sizes(const Clustering& c) {
  std::vector<std::size_t> sizes(c.num_clusters(), 0);
  for (const int a : c.assignment) {
    ++sizes[static_cast<std::size_t>(a)];
  }
  return sizes;
}

double entropy_bits(const std::vector<std::size_t>& sizes, double n) {
  double h = 0.0;
  for (const auto s : sizes) {
    if (s > 0) {
      const double p = static_cast<double>(s) / n;
      h -= p * std::log2(p);
    }
  }
  return h;
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

double scaled_vi(const Clustering& pred, const Clustering& gold) {
  check_universe(pred, gold);
  const auto n = static_cast<double>(pred.size());
  if (pred.size() < 2) {
    throw ShapeError("scaled VI needs at least two messages");
  }
  const double h_pred = entropy_bits(cluster_sizes(pred), n);
  const double h_gold = entropy_bits(cluster_sizes(gold), n);
  const auto sp = cluster_sizes(pred);
  const auto sg = cluster_sizes(gold);
  double mutual = 0.0;
  for (const auto& [key, count] : contingency(pred, gold)) {
    const double pij = static_cast<double>(count) / n;
    const double pi = static_cast<double>(sp[static_cast<std::size_t>(key.first)]) / n;
    const double pj = static_cast<double>(sg[static_cast<std::size_t>(key.second)]) / n;
    mutual += pij * std::log2(pij / (pi * pj));
  }
  const double vi = std::max(0.0, h_pred + h_gold - 2.0 * mutual);
  return 100.0 * (1.0 - vi / std::log2(n));
}

double ari(const Clustering& pred, const Clustering& gold) {
  check_universe(pred, gold);
  const auto n = static_cast<double>(pred.size());
  double index = 0.0;
  for (const auto& [key, count] : contingency(pred, gold)) {
    index += choose2(static_cast<double>(count));
  }
  double sum_pred = 0.0, sum_gold = 0.0;
  for (const auto s : cluster_sizes(pred)) {
    sum_pred += choose2(static_cast<double>(s));
  }
  for (const auto s : cluster_sizes(gold)) {
    sum_gold += choose2(static_cast<double>(s));
  }
  const double total = choose2(n);
  const double expected = total > 0.0 ? sum_pred * sum_gold / total : 0.0;
  const double maximum = 0.5 * (sum_pred + sum_gold);
  if (maximum == expected) {
    return pred == gold ? 100.0 : 0.0;
  }
  return 100.0 * (index - expected) / (maximum - expected);
}

double one_to_one(const Clustering& pred, const Clustering& gold) {
  check_universe(pred, gold);
  if (pred.size() == 0) {
    return 100.0;
  }
  std::vector<std::vector<std::int64_t>> weights(
      pred.num_clusters(), std::vector<std::int64_t>(gold.num_clusters(), 0));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++weights[static_cast<std::size_t>(pred.assignment[i])]
             [static_cast<std::size_t>(gold.assignment[i])];
  }
  const auto match = max_weight_assignment(weights);
  std::int64_t mass = 0;
  for (std::size_t r = 0; r < match.size(); ++r) {
    if (match[r] >= 0) {
      mass += weights[r][static_cast<std::size_t>(match[r])];
    }
  }
  return 100.0 * static_cast<double>(mass) / static_cast<double>(pred.size());
}

ExactMatchCounts exact_match_counts(const Clustering& pred, const Clustering& gold) {
  check_universe(pred, gold);
  std::set<std::vector<std::size_t>> gold_sets;
  ExactMatchCounts c;
  for (auto& members : gold.members()) {
    if (members.size() > 1) {
      gold_sets.insert(std::move(members));
      ++c.gold;
    }
  }
  for (const auto& members : pred.members()) {
    if (members.size() > 1) {
      ++c.predicted;
      c.correct += gold_sets.contains(members) ? 1 : 0;
    }
  }
  return c;
}

PrecisionRecall prf_from_counts(const ExactMatchCounts& c) {
  PrecisionRecall r;
  if (c.predicted > 0) {
    r.precision = 100.0 * static_cast<double>(c.correct) / static_cast<double>(c.predicted);
  } else {
    r.empty_denominator = true;
  }
  if (c.gold > 0) {
    r.recall = 100.0 * static_cast<double>(c.correct) / static_cast<double>(c.gold);
  } else {
    r.empty_denominator = true;
  }
  if (r.precision + r.recall > 0.0) {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  }
  return r;
}

PrecisionRecall exact_match_prf(const Clustering& pred, const Clustering& gold) {
  return prf_from_counts(exact_match_counts(pred, gold));
}

MetricsReport evaluate_clustering(const Clustering& pred, const Clustering& gold) {
  check_universe(pred, gold);
  MetricsReport r;
  r.messages = pred.size();
  r.scaled_vi = pred.size() >= 2 ? scaled_vi(pred, gold) : 100.0;
  r.ari = ari(pred, gold);
  r.one_to_one = one_to_one(pred, gold);
  r.counts = exact_match_counts(pred, gold);
  const auto prf = prf_from_counts(r.counts);
  r.precision = prf.precision;
  r.recall = prf.recall;
  r.f1 = prf.f1;
  return r;
}

MetricsReport evaluate(std::span<const Clustering> preds, std::span<const Clustering> gold) {
  if (preds.size() != gold.size()) {
    throw ShapeError("evaluate: " + std::to_string(preds.size()) + " predictions for " +
                     std::to_string(gold.size()) + " gold channels");
  }
  MetricsReport total;
  double vi = 0.0, adj = 0.0, oto = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto r = evaluate_clustering(preds[i], gold[i]);
    const auto w = static_cast<double>(r.messages);
    vi += w * r.scaled_vi;
    adj += w * r.ari;
    oto += w * r.one_to_one;
    total.messages += r.messages;
    total.counts += r.counts;
  }
  if (total.messages > 0) {
    const auto n = static_cast<double>(total.messages);
    total.scaled_vi = vi / n;
    total.ari = adj / n;
    total.one_to_one = oto / n;
  }
  const auto prf = prf_from_counts(total.counts);
  total.precision = prf.precision;
  total.recall = prf.recall;
  total.f1 = prf.f1;
  return total;
}

void write_report_table(std::ostream& out, const MetricsReport& r) {
  const auto flags = out.flags();
  out << std::right << std::setw(8) << "VI" << std::setw(8) << "ARI" << std::setw(8) << "1-1"
      << std::setw(8) << "F1" << std::setw(8) << "P" << std::setw(8) << "R" << '\n'
      << std::fixed << std::setprecision(2) << std::setw(8) << r.scaled_vi << std::setw(8)
      << r.ari << std::setw(8) << r.one_to_one << std::setw(8) << r.f1 << std::setw(8)
      << r.precision << std::setw(8) << r.recall << '\n';
  out.flags(flags);
}

void write_report_keyvalue(std::ostream& out, const MetricsReport& r) {
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(2) << "VI=" << r.scaled_vi << '\n'
      << "ARI=" << r.ari << '\n'
      << "1-1=" << r.one_to_one << '\n'
      << "F1=" << r.f1 << '\n'
      << "P=" << r.precision << '\n'
      << "R=" << r.recall << '\n';
  out.flags(flags);
}

}  // namespace untangle
