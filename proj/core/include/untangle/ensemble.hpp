#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "untangle/inference.hpp"

namespace untangle {

enum class EnsembleStrategy { kModelAverage, kProbabilityAverage, kVote };

EnsembleStrategy parse_strategy(std::string_view text);  // model-avg | prob-avg | vote
std::string_view to_string(EnsembleStrategy strategy);

/// Element-wise mean of every tensor. Throws ShapeError when configurations
/// or tensor shapes differ, or the list is empty.
ModelParams model_avg(std::span<const ModelParams> models);

/// Element-wise mean of probability vectors over the same slots.
Scores prob_avg(std::span<const Scores> scores);

/// Slot with the most votes. Ties go to the highest mean probability, then to
/// the earliest slot in `order` (most recent candidate first).
std::size_t vote(std::span<const std::size_t> choices, std::span<const Scores> scores,
                 const std::vector<std::size_t>& order);

class ProbAverageRanker final : public Ranker {
 public:
  explicit ProbAverageRanker(std::vector<const Ranker*> members);
  Scores score(const PairBatch& batch,
               const std::vector<FeatureVector>& features) const override;

 private:
  std::vector<const Ranker*> members_;
};

/// Majority vote of the members' choices; score() reports the mean probability.
class VoteRanker final : public Ranker {
 public:
  explicit VoteRanker(std::vector<const Ranker*> members);
  Scores score(const PairBatch& batch,
               const std::vector<FeatureVector>& features) const override;
  std::size_t choose(const PairBatch& batch,
                     const std::vector<FeatureVector>& features) const override;

 private:
  std::vector<const Ranker*> members_;
};

}  // namespace untangle
