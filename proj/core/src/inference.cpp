#include "untangle/inference.hpp"

#include "untangle/corpus.hpp"
#include "untangle/model.hpp"

namespace untangle {

std::size_t Ranker::choose(const PairBatch& batch,
                           const std::vector<FeatureVector>& features) const {
  return select_slot(score(batch, features), batch.valid_mask, recency_order(batch));
}

Scores ModelRanker::score(const PairBatch& batch,
                          const std::vector<FeatureVector>& features) const {
  return score_batch(*model_, batch, &features);
}

Scores BaselineRanker::score(const PairBatch& batch,
                             const std::vector<FeatureVector>& features) const {
  return baseline_rank(*model_, features, batch.valid_mask);
}

std::size_t predict_parent(const Ranker& ranker, const Channel& channel,
                           const Vocabulary& vocab, std::size_t target_index,
                           const WindowConfig& window) {
  const auto batch = build_context_window(channel, vocab, target_index, window);
  if (batch.num_valid() == 1) {
    return target_index;
  }
  const auto features = featurize_batch(channel, batch);
  return batch.candidate_indices[ranker.choose(batch, features)];
}

ReplyGraph resolve_links(const std::vector<std::size_t>& chosen) {
  const auto n = chosen.size();
  ReplyGraph g;
  g.parent.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.parent[i] = chosen[i] <= i ? chosen[i] : i;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = chosen[i];
    if (j <= i || j >= n) {
      continue;
    }
    if (g.parent[j] == j) {
      g.parent[j] = i;
    } else if (g.parent[j] < i) {
      g.parent[i] = g.parent[j];
    }
  }
  return g;
}

ChannelPrediction predict_channel(const Ranker& ranker, const Channel& channel,
                                  const Vocabulary& vocab, const WindowConfig& window) {
  std::vector<std::size_t> chosen(channel.size());
  for (std::size_t t = 0; t < channel.size(); ++t) {
    chosen[t] = predict_parent(ranker, channel, vocab, t, window);
  }
  ChannelPrediction out;
  out.graph = resolve_links(chosen);
  out.clusters = build_clusters(out.graph);
  return out;
}

double parent_accuracy(const Ranker& ranker, std::span<const Example> examples) {
  if (examples.empty()) {
    return 0.0;
  }
  std::size_t hits = 0;
  for (const auto& ex : examples) {
    if (ex.batch.parent_in_window &&
        ranker.choose(ex.batch, ex.features) == ex.batch.parent_slot) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(examples.size());
}

}  // namespace untangle
