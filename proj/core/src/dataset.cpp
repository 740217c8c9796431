#include "untangle/dataset.hpp"

#include "untangle/corpus.hpp"

namespace untangle {

std::vector<Example> make_examples(std::span<const Channel> channels, const Vocabulary& vocab,
                                   const WindowConfig& window, bool skip_out_of_window,
                                   ExampleSetStats* stats) {
  std::vector<Example> out;
  ExampleSetStats local;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const auto& channel = channels[c];
    for (std::size_t t = 0; t < channel.size(); ++t) {
      ++local.targets;
      auto batch = build_context_window(channel, vocab, t, window);
      if (!batch.parent_in_window) {
        ++local.skipped_out_of_window;
        if (skip_out_of_window) {
          continue;
        }
      }
      Example ex;
      ex.channel = c;
      ex.features = featurize_batch(channel, batch);
      ex.batch = std::move(batch);
      out.push_back(std::move(ex));
    }
  }
  if (stats != nullptr) {
    *stats = local;
  }
  return out;
}

}  // namespace untangle
