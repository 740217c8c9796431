#pragma once

#include <span>
#include <vector>

#include "untangle/context_window.hpp"
#include "untangle/features.hpp"

namespace untangle {

struct Channel;

/// A target message ready for scoring: its candidate window and the
/// per-slot pair features.
struct Example {
  std::size_t channel = 0;  // position in the channel list it was built from
  PairBatch batch;
  std::vector<FeatureVector> features;
};

struct ExampleSetStats {
  std::size_t targets = 0;
  std::size_t skipped_out_of_window = 0;
};

/// One example per message. With `skip_out_of_window` set, targets whose gold
/// parent lies beyond the context range are dropped (training); otherwise they
/// are kept with the parent forced to slot 0 so they score as errors.
std::vector<Example> make_examples(std::span<const Channel> channels, const Vocabulary& vocab,
                                   const WindowConfig& window, bool skip_out_of_window,
                                   ExampleSetStats* stats = nullptr);

}  // namespace untangle
