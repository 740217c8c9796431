#include "untangle/context_window.hpp"

#include <algorithm>

#include "untangle/corpus.hpp"
#include "untangle/error.hpp"

namespace untangle {

namespace {

constexpr std::size_t kTruncationFloor = 5;

}  // namespace

void WindowConfig::validate() const {
  if (context_range < 1) {
    throw DataError("context range must be at least 1");
  }
  if (max_seq_len < 3 + 2 * kTruncationFloor) {
    throw DataError("max_seq_len must be at least 13");
  }
}

std::size_t PairBatch::num_valid() const {
  return static_cast<std::size_t>(std::count(valid_mask.begin(), valid_mask.end(), true));
}

std::vector<TokenId> make_pair_tokens(const std::vector<TokenId>& target,
                                      const std::vector<TokenId>& candidate,
                                      std::size_t max_seq_len) {
  const std::size_t budget = max_seq_len >= 3 ? max_seq_len - 3 : 0;
  std::size_t keep_target = target.size();
  std::size_t keep_candidate = candidate.size();
  if (keep_target + keep_candidate > budget) {
    const auto candidate_floor = std::min(keep_candidate, kTruncationFloor);
    const auto excess = keep_target + keep_candidate - budget;
    keep_candidate -= std::min(excess, keep_candidate - candidate_floor);
  }
  if (keep_target + keep_candidate > budget) {
    const auto target_floor = std::min(keep_target, kTruncationFloor);
    const auto excess = keep_target + keep_candidate - budget;
    keep_target -= std::min(excess, keep_target - target_floor);
  }

  std::vector<TokenId> out;
  out.reserve(keep_target + keep_candidate + 3);
  out.push_back(Vocabulary::kCls);
  out.insert(out.end(), target.begin(), target.begin() + static_cast<std::ptrdiff_t>(keep_target));
  out.push_back(Vocabulary::kSep);
  out.insert(out.end(), candidate.begin(),
             candidate.begin() + static_cast<std::ptrdiff_t>(keep_candidate));
  out.push_back(Vocabulary::kSep);
  return out;
}

PairBatch build_context_window(const Channel& channel, const Vocabulary& vocab,
                               std::size_t target_index,
                               const WindowConfig& config) {
  config.validate();
  if (target_index >= channel.size()) {
    throw DataError("target index " + std::to_string(target_index) +
                    " outside channel of " + std::to_string(channel.size()));
  }
  const auto slots = config.num_slots();
  const auto& target = channel.messages[target_index];
  const auto target_ids = vocab.encode(target.words);
  const auto& gold_members = channel.gold_clusters.assignment;
  const bool have_gold = gold_members.size() == channel.size();

  PairBatch batch;
  batch.target_index = target_index;
  batch.context_range = config.context_range;
  batch.pair_tokens.resize(slots);
  batch.candidate_indices.assign(slots, target_index);
  batch.valid_mask.assign(slots, false);
  batch.conv_labels.assign(slots, false);

  auto fill = [&](std::size_t slot, std::size_t candidate) {
    batch.candidate_indices[slot] = candidate;
    batch.valid_mask[slot] = true;
    batch.pair_tokens[slot] = make_pair_tokens(
        target_ids, vocab.encode(channel.messages[candidate].words), config.max_seq_len);
    if (have_gold && slot != 0) {
      batch.conv_labels[slot] = gold_members[candidate] == gold_members[target_index];
    }
  };

  fill(0, target_index);
  for (std::size_t slot = 1; slot < config.context_range && slot <= target_index; ++slot) {
    fill(slot, target_index - slot);
  }
  for (std::size_t k = 0; k < config.future; ++k) {
    const auto candidate = target_index + 1 + k;
    if (candidate >= channel.size()) {
      break;
    }
    fill(config.context_range + k, candidate);
  }

  const auto gold = target.gold_parent;
  const auto distance = target_index - gold;
  if (distance < config.context_range) {
    batch.parent_slot = distance;
    batch.parent_in_window = true;
  } else {
    batch.parent_slot = 0;
    batch.parent_in_window = false;
  }
  // The self pair is labelled only for conversation starts.
  batch.conv_labels[0] = batch.parent_in_window && batch.parent_slot == 0;
  return batch;
}

std::vector<std::size_t> recency_order(const PairBatch& batch) {
  std::vector<std::size_t> order;
  order.reserve(batch.num_slots());
  for (std::size_t s = 1; s < batch.context_range && s < batch.num_slots(); ++s) {
    order.push_back(s);
  }
  order.push_back(0);
  for (std::size_t s = batch.context_range; s < batch.num_slots(); ++s) {
    order.push_back(s);
  }
  return order;
}

}  // namespace untangle
