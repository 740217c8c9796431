#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "untangle/corpus.hpp"

namespace untangle {

/// Knobs of the synthetic interleaved-chat generator.
struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t channels = 20;
  std::size_t conversations = 3;   // per channel, interleaved
  std::size_t messages = 30;       // per conversation
  std::size_t themes = 3;          // global keyword themes; a channel gives each conversation its own
  std::size_t keywords_per_theme = 10;
  std::size_t speakers_per_conversation = 3;
  double join_rate = 0.05;         // chance of a system join line before a message
  double address_rate = 0.3;       // chance a reply names its parent's speaker
  double reach_back_rate = 0.05;   // chance a reply skips past the latest message
  double mean_gap_minutes = 0.7;   // mean of the exponential inter-line gap

  /// Throws DataError for combinations the generator cannot honour.
  void validate() const;
};

/// Deterministic channels named "synth-000", "synth-001", ... Each message
/// except a conversation's first replies to a recent message of the same
/// conversation; join lines start their own one-line conversations.
std::vector<Channel> generate_corpus(const SynthConfig& config);

}  // namespace untangle
