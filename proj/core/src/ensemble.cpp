#include "untangle/ensemble.hpp"

#include <map>
#include <string>

#include "untangle/error.hpp"

namespace untangle {

EnsembleStrategy parse_strategy(std::string_view text) {
  if (text == "model-avg") {
    return EnsembleStrategy::kModelAverage;
  }
  if (text == "prob-avg") {
    return EnsembleStrategy::kProbabilityAverage;
  }
  if (text == "vote") {
    return EnsembleStrategy::kVote;
  }
  throw ParseError("unknown ensemble strategy \"" + std::string(text) +
                   "\" (expected model-avg, prob-avg or vote)");
}

std::string_view to_string(EnsembleStrategy strategy) {
  switch (strategy) {
    case EnsembleStrategy::kModelAverage:
      return "model-avg";
    case EnsembleStrategy::kProbabilityAverage:
      return "prob-avg";
    case EnsembleStrategy::kVote:
      return "vote";
  }
  return "unknown";
}

ModelParams model_avg(std::span<const ModelParams> models) {
  if (models.empty()) {
    throw ShapeError("model_avg: no models");
  }
  const auto& first = models.front();
  ParamSet sum = first.tensors.zeros_like();
  for (const auto& m : models) {
    if (!(m.config == first.config) || !m.tensors.same_layout(first.tensors)) {
      throw ShapeError("model_avg: models differ in configuration or tensor shapes");
    }
    sum.add_scaled(1.0, m.tensors);
  }
  sum.scale(1.0 / static_cast<double>(models.size()));
  return make_model(first.config, std::move(sum));
}

Scores prob_avg(std::span<const Scores> scores) {
  if (scores.empty()) {
    throw ShapeError("prob_avg: no score vectors");
  }
  Scores out;
  out.probs.assign(scores.front().size(), 0.0);
  for (const auto& s : scores) {
    if (s.size() != out.size()) {
      throw ShapeError("prob_avg: score vectors differ in length");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      out.probs[i] += s.probs[i];
    }
  }
  for (auto& p : out.probs) {
    p /= static_cast<double>(scores.size());
  }
  return out;
}

std::size_t vote(std::span<const std::size_t> choices, std::span<const Scores> scores,
                 const std::vector<std::size_t>& order) {
  if (choices.empty()) {
    throw ShapeError("vote: no voters");
  }
  std::map<std::size_t, std::size_t> tally;
  for (const auto c : choices) {
    ++tally[c];
  }
  const Scores mean = scores.empty() ? Scores{} : prob_avg(scores);
  auto mean_of = [&](std::size_t slot) {
    return slot < mean.size() ? mean.probs[slot] : 0.0;
  };
  auto rank_of = [&](std::size_t slot) {
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (order[r] == slot) {
        return r;
      }
    }
    return order.size() + slot;
  };
  std::size_t best = tally.begin()->first;
  for (const auto& [slot, count] : tally) {
    const auto best_count = tally[best];
    if (count > best_count ||
        (count == best_count &&
         (mean_of(slot) > mean_of(best) ||
          (mean_of(slot) == mean_of(best) && rank_of(slot) < rank_of(best))))) {
      best = slot;
    }
  }
  return best;
}

ProbAverageRanker::ProbAverageRanker(std::vector<const Ranker*> members)
    : members_(std::move(members)) {
  if (members_.empty()) {
    throw ShapeError("ensemble needs at least one member");
  }
}

Scores ProbAverageRanker::score(const PairBatch& batch,
                                const std::vector<FeatureVector>& features) const {
  std::vector<Scores> all;
  all.reserve(members_.size());
  for (const auto* m : members_) {
    all.push_back(m->score(batch, features));
  }
  return prob_avg(all);
}

VoteRanker::VoteRanker(std::vector<const Ranker*> members) : members_(std::move(members)) {
  if (members_.empty()) {
    throw ShapeError("ensemble needs at least one member");
  }
}

Scores VoteRanker::score(const PairBatch& batch,
                         const std::vector<FeatureVector>& features) const {
  std::vector<Scores> all;
  for (const auto* m : members_) {
    all.push_back(m->score(batch, features));
  }
  return prob_avg(all);
}

std::size_t VoteRanker::choose(const PairBatch& batch,
                               const std::vector<FeatureVector>& features) const {
  std::vector<Scores> all;
  std::vector<std::size_t> choices;
  const auto order = recency_order(batch);
  for (const auto* m : members_) {
    all.push_back(m->score(batch, features));
    choices.push_back(select_slot(all.back(), batch.valid_mask, order));
  }
  return vote(choices, all, order);
}

}  // namespace untangle
