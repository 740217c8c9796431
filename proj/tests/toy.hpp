// Small seeded fixtures shared by the model tests.
#pragma once

#include <vector>

#include "untangle/corpus.hpp"
#include "untangle/dataset.hpp"
#include "untangle/model_config.hpp"
#include "untangle/synth.hpp"
#include "untangle/vocabulary.hpp"

namespace toy {

struct Fixture {
  std::vector<untangle::Channel> channels;
  untangle::Vocabulary vocab;
  untangle::WindowConfig window;
  std::vector<untangle::Example> examples;
};

// One short synthetic channel with a T=4 window.
inline Fixture small_fixture(std::size_t context_range = 4, std::size_t max_seq_len = 16) {
  Fixture f;
  untangle::SynthConfig cfg;
  cfg.channels = 1;
  cfg.conversations = 2;
  cfg.messages = 4;
  f.channels = untangle::generate_corpus(cfg);
  f.vocab = untangle::build_vocab(f.channels, 1);
  f.window.context_range = context_range;
  f.window.max_seq_len = max_seq_len;
  f.examples = untangle::make_examples(f.channels, f.vocab, f.window, true);
  return f;
}

// d=8, one layer, two heads, k=2.
inline untangle::ModelConfig tiny_config(std::size_t vocab_size, bool context = true,
                                         bool features = false) {
  untangle::ModelConfig c;
  c.encoder.vocab_size = vocab_size;
  c.encoder.width = 8;
  c.encoder.layers = 1;
  c.encoder.heads = 2;
  c.encoder.ff_width = 16;
  c.encoder.max_seq_len = 16;
  c.lstm_hidden = 2;
  c.use_context = context;
  c.use_features = features;
  return c;
}

}  // namespace toy
