#pragma once

#include <cstddef>
#include <vector>

#include "untangle/vocabulary.hpp"

namespace untangle {

struct Channel;

struct WindowConfig {
  std::size_t context_range = 50;  // T: self pair plus T-1 preceding messages
  std::size_t future = 0;          // extra slots for following messages
  std::size_t max_seq_len = 100;

  std::size_t num_slots() const { return context_range + future; }
  void validate() const;
};

/// Candidate pairs for one target message.
///
/// Slot 0 pairs the target with itself, slots 1..T-1 hold the preceding
/// messages newest first, and slots T..T+K-1 the following messages oldest
/// first. Slots past the channel edges are padding.
struct PairBatch {
  std::size_t target_index = 0;
  std::vector<std::vector<TokenId>> pair_tokens;  // empty for padded slots
  std::vector<std::size_t> candidate_indices;     // == target_index for padding
  std::vector<bool> valid_mask;
  std::size_t parent_slot = 0;
  bool parent_in_window = true;  // false: gold parent too old, slot forced to 0
  std::vector<bool> conv_labels;
  std::size_t context_range = 0;

  std::size_t num_slots() const { return valid_mask.size(); }
  std::size_t num_valid() const;
  bool is_future_slot(std::size_t slot) const { return slot >= context_range; }
};

/// Assembles [cls] target [sep] candidate [sep] id sequences, truncating the
/// candidate side first. Neither side drops below five tokens unless the
/// message itself is shorter.
std::vector<TokenId> make_pair_tokens(const std::vector<TokenId>& target,
                                      const std::vector<TokenId>& candidate,
                                      std::size_t max_seq_len);

PairBatch build_context_window(const Channel& channel, const Vocabulary& vocab,
                               std::size_t target_index,
                               const WindowConfig& config);

/// Slot order used to break score ties: nearest preceding message first, then
/// the self pair, then future slots in order.
std::vector<std::size_t> recency_order(const PairBatch& batch);

}  // namespace untangle
