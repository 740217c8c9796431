#pragma once

#include <cstddef>
#include <vector>

namespace untangle {

/// Partition of message indices 0..n-1 into conversations. Ids are contiguous
/// and numbered in order of each conversation's first message.
struct Clustering {
  std::vector<int> assignment;

  std::size_t size() const { return assignment.size(); }
  std::size_t num_clusters() const;
  std::vector<std::vector<std::size_t>> members() const;

  /// Renumbers arbitrary labels into first-appearance order.
  static Clustering from_labels(const std::vector<int>& labels);

  bool operator==(const Clustering&) const = default;
};

/// Reply links; parent[i] == i marks a conversation start.
struct ReplyGraph {
  std::vector<std::size_t> parent;

  std::size_t size() const { return parent.size(); }
  std::size_t num_self_links() const;
};

/// Connected components of the undirected reply graph (union-find with path
/// compression and union by size).
Clustering build_clusters(const ReplyGraph& graph);

/// Disjoint-set forest over 0..n-1.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace untangle
