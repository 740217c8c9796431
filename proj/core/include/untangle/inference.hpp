#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "untangle/baselines.hpp"
#include "untangle/classifier.hpp"
#include "untangle/clustering.hpp"
#include "untangle/context_window.hpp"
#include "untangle/dataset.hpp"
#include "untangle/model_config.hpp"

namespace untangle {

struct Channel;

/// Anything that turns a candidate window into a slot distribution.
class Ranker {
 public:
  virtual ~Ranker() = default;
  virtual Scores score(const PairBatch& batch,
                       const std::vector<FeatureVector>& features) const = 0;
  /// Winning slot; the default is argmax with recency tie-breaking.
  virtual std::size_t choose(const PairBatch& batch,
                             const std::vector<FeatureVector>& features) const;
};

class ModelRanker final : public Ranker {
 public:
  explicit ModelRanker(const ModelParams& model) : model_(&model) {}
  Scores score(const PairBatch& batch,
               const std::vector<FeatureVector>& features) const override;

 private:
  const ModelParams* model_;
};

class BaselineRanker final : public Ranker {
 public:
  explicit BaselineRanker(const BaselineModel& model) : model_(&model) {}
  Scores score(const PairBatch& batch,
               const std::vector<FeatureVector>& features) const override;

 private:
  const BaselineModel* model_;
};

/// Channel index of the predicted parent. A winning self pair means a new
/// conversation; a winning future slot returns that later index.
std::size_t predict_parent(const Ranker& ranker, const Channel& channel,
                           const Vocabulary& vocab, std::size_t target_index,
                           const WindowConfig& window);

/// Turns per-target choices (which may point forward) into a ReplyGraph with
/// parent[i] <= i. A target i that chose a later message j becomes j's parent
/// when j started a conversation; otherwise i joins j's earlier parent when
/// that precedes i, and stays a conversation start when it does not.
ReplyGraph resolve_links(const std::vector<std::size_t>& chosen);

struct ChannelPrediction {
  ReplyGraph graph;
  Clustering clusters;
};

ChannelPrediction predict_channel(const Ranker& ranker, const Channel& channel,
                                  const Vocabulary& vocab, const WindowConfig& window);

/// Share of examples whose chosen slot is the gold parent slot. Examples with
/// the gold parent outside the window always count as misses.
double parent_accuracy(const Ranker& ranker, std::span<const Example> examples);

}  // namespace untangle
