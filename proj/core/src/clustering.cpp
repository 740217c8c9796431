#include "untangle/clustering.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace untangle {

std::size_t Clustering::num_clusters() const {
  int top = -1;
  for (const int a : assignment) {
    top = std::max(top, a);
  }
  return static_cast<std::size_t>(top + 1);
}

std::vector<std::vector<std::size_t>> Clustering::members() const {
  std::vector<std::vector<std::size_t>> out(num_clusters());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    out[static_cast<std::size_t>(assignment[i])].push_back(i);
  }
  return out;
}

Clustering Clustering::from_labels(const std::vector<int>& labels) {
  std::unordered_map<int, int> remap;
  Clustering c;
  c.assignment.reserve(labels.size());
  for (const int label : labels) {
    auto [it, inserted] = remap.try_emplace(label, static_cast<int>(remap.size()));
    c.assignment.push_back(it->second);
  }
  return c;
}

std::size_t ReplyGraph::num_self_links() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    n += parent[i] == i ? 1 : 0;
  }
  return n;
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) {
    root = parent_[root];
  }
  while (parent_[x] != root) {
    const auto next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

bool DisjointSets::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) {
    return false;
  }
  if (size_[a] < size_[b]) {
    std::swap(a, b);
  }
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

Clustering build_clusters(const ReplyGraph& graph) {
  const auto n = graph.size();
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    sets.unite(i, graph.parent[i]);
  }
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(sets.find(i));
  }
  return Clustering::from_labels(labels);
}

}  // namespace untangle
