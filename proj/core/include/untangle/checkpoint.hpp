#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "untangle/baselines.hpp"
#include "untangle/context_window.hpp"
#include "untangle/model_config.hpp"
#include "untangle/vocabulary.hpp"

namespace untangle {

/// Everything needed to rerun inference: either the full pair model or a
/// feature baseline, the vocabulary and the window it was trained with.
struct Checkpoint {
  std::optional<ModelParams> model;
  std::optional<BaselineModel> baseline;
  Vocabulary vocab;
  WindowConfig window;

  bool is_baseline() const { return baseline.has_value(); }
};

/// Plain-text format: a header line, key=value settings, the embedded
/// vocabulary, then one "tensor name rows cols" block per tensor with values
/// printed to round-trip exactly.
void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);  // throws ParseError

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace untangle
