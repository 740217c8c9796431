// Slow, obviously-correct reference implementations used to cross-check the
// library in unit tests and in the acceptance run.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "untangle/clustering.hpp"

namespace oracle {

using Labels = std::vector<int>;

inline Labels random_labels(std::mt19937_64& rng, std::size_t n, int max_clusters) {
  std::uniform_int_distribution<int> pick(0, max_clusters - 1);
  Labels out(n);
  for (auto& l : out) {
    l = pick(rng);
  }
  return out;
}

// True when two labelings describe the same partition.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) {
    return false;
  }
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab.emplace(a[i], b[i]);
    if (ab.at(a[i]) != b[i]) {
      return false;
    }
    ba.emplace(b[i], a[i]);
    if (ba.at(b[i]) != a[i]) {
      return false;
    }
  }
  return true;
}

// Entropies by enumerating every message and counting label combinations.
inline double vi_bits(const Labels& a, const Labels& b) {
  const double n = static_cast<double>(a.size());
  std::map<int, double> pa, pb;
  std::map<std::pair<int, int>, double> pab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1.0 / n;
    pb[b[i]] += 1.0 / n;
    pab[{a[i], b[i]}] += 1.0 / n;
  }
  double ha = 0.0, hb = 0.0, mi = 0.0;
  for (const auto& [k, p] : pa) ha -= p * std::log2(p);
  for (const auto& [k, p] : pb) hb -= p * std::log2(p);
  for (const auto& [k, p] : pab) mi += p * std::log2(p / (pa[k.first] * pb[k.second]));
  return ha + hb - 2.0 * mi;
}

inline double scaled_vi(const Labels& pred, const Labels& gold) {
  return 100.0 * (1.0 - vi_bits(pred, gold) / std::log2(static_cast<double>(pred.size())));
}

// Adjusted Rand index from explicit pair enumeration.
inline double ari(const Labels& pred, const Labels& gold) {
  const std::size_t n = pred.size();
  double both = 0, in_pred = 0, in_gold = 0, pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool p = pred[i] == pred[j];
      const bool g = gold[i] == gold[j];
      both += (p && g) ? 1 : 0;
      in_pred += p ? 1 : 0;
      in_gold += g ? 1 : 0;
      pairs += 1;
    }
  }
  const double expected = in_pred * in_gold / pairs;
  const double max_index = 0.5 * (in_pred + in_gold);
  if (max_index == expected) {
    return same_partition(pred, gold) ? 100.0 : 0.0;
  }
  return 100.0 * (both - expected) / (max_index - expected);
}

// Best one-to-one matching by trying every injection of the smaller side.
inline double one_to_one(const Labels& pred, const Labels& gold) {
  std::vector<int> pl(pred.begin(), pred.end()), gl(gold.begin(), gold.end());
  std::sort(pl.begin(), pl.end());
  pl.erase(std::unique(pl.begin(), pl.end()), pl.end());
  std::sort(gl.begin(), gl.end());
  gl.erase(std::unique(gl.begin(), gl.end()), gl.end());
  std::map<std::pair<int, int>, int> overlap;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++overlap[{pred[i], gold[i]}];
  }
  const bool pred_small = pl.size() <= gl.size();
  const auto& small = pred_small ? pl : gl;
  std::vector<int> big = pred_small ? gl : pl;
  // Pad the larger side's permutation domain; enumerate permutations of it and
  // match small[i] with big[i].
  std::sort(big.begin(), big.end());
  int best = 0;
  do {
    int total = 0;
    for (std::size_t i = 0; i < small.size(); ++i) {
      const auto key = pred_small ? std::make_pair(small[i], big[i])
                                  : std::make_pair(big[i], small[i]);
      const auto it = overlap.find(key);
      total += it == overlap.end() ? 0 : it->second;
    }
    best = std::max(best, total);
  } while (std::next_permutation(big.begin(), big.end()));
  return 100.0 * best / static_cast<double>(pred.size());
}

inline std::set<std::set<std::size_t>> non_singleton_sets(const Labels& labels) {
  std::map<int, std::set<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    groups[labels[i]].insert(i);
  }
  std::set<std::set<std::size_t>> out;
  for (auto& [k, members] : groups) {
    if (members.size() > 1) {
      out.insert(members);
    }
  }
  return out;
}

struct Prf {
  double p = 0, r = 0, f = 0;
};

// Exact-match precision/recall over non-singleton clusters via set equality.
inline Prf exact_match(const Labels& pred, const Labels& gold) {
  const auto ps = non_singleton_sets(pred);
  const auto gs = non_singleton_sets(gold);
  std::size_t correct = 0;
  for (const auto& s : ps) {
    correct += gs.count(s);
  }
  Prf out;
  out.p = ps.empty() ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(ps.size());
  out.r = gs.empty() ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(gs.size());
  out.f = out.p + out.r == 0.0 ? 0.0 : 2.0 * out.p * out.r / (out.p + out.r);
  return out;
}

// Connected components by breadth-first search over the undirected graph.
inline std::vector<int> bfs_components(const std::vector<std::size_t>& parent) {
  const std::size_t n = parent.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (parent[i] != i) {
      adj[i].push_back(parent[i]);
      adj[parent[i]].push_back(i);
    }
  }
  std::vector<int> comp(n, -1);
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) {
      continue;
    }
    std::queue<std::size_t> q;
    q.push(s);
    comp[s] = next;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (const auto v : adj[u]) {
        if (comp[v] < 0) {
          comp[v] = next;
          q.push(v);
        }
      }
    }
    ++next;
  }
  return comp;
}

inline untangle::ReplyGraph random_graph(std::mt19937_64& rng, std::size_t n, double self_rate) {
  untangle::ReplyGraph g;
  g.parent.resize(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || unit(rng) < self_rate) {
      g.parent[i] = i;
    } else {
      g.parent[i] = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    }
  }
  return g;
}

}  // namespace oracle
