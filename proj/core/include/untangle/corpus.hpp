#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "untangle/clustering.hpp"

namespace untangle {

/// One chat line positioned in its channel.
struct Message {
  std::size_t index = 0;
  std::string raw;
  std::vector<std::string> words;  // tokenized "speaker body", truncated
  std::string speaker;
  std::optional<int> time;  // minutes, day rollovers already folded in
  bool is_system = false;
  std::optional<std::string> target_nick;
  std::size_t gold_parent = 0;  // == index for conversation starts

  bool operator==(const Message&) const = default;
};

/// An ordered message stream with its gold reply structure.
struct Channel {
  std::string name;
  std::vector<Message> messages;
  Clustering gold_clusters;

  std::size_t size() const { return messages.size(); }

  bool operator==(const Channel&) const = default;
};

struct LoadOptions {
  std::size_t max_seq_len = 100;
};

/// Summary of index remapping performed while loading.
struct LoadReport {
  std::size_t first_index = 0;
  std::size_t clamped_parents = 0;  // parents that preceded the file's first line
};

/// Reads an annotated channel: one record per line, columns parent index,
/// index and raw text, separated by tabs (or, failing that, whitespace).
///
/// Indices must be consecutive; they are shifted so the first line becomes 0.
/// A parent that precedes the first line of the file is treated as a
/// conversation start and counted in `report`.
Channel read_channel(std::istream& in, std::string name,
                     const LoadOptions& options = {},
                     LoadReport* report = nullptr);

Channel load_annotated_channel(const std::filesystem::path& path,
                               const LoadOptions& options = {},
                               LoadReport* report = nullptr);

/// Builds a channel from raw lines plus parent links (0-based, parent <= i).
Channel make_channel(std::string name, const std::vector<std::string>& raw_lines,
                     const std::vector<std::size_t>& parents,
                     const LoadOptions& options = {});

/// Writes the three-column format; `parents` overrides the gold links when
/// given (used for prediction output).
void write_channel(std::ostream& out, const Channel& channel,
                   const std::vector<std::size_t>* parents = nullptr);

void save_annotated_channel(const std::filesystem::path& path,
                            const Channel& channel,
                            const std::vector<std::size_t>* parents = nullptr);

/// Loads every regular file in `dir` (sorted by file name) or the single file
/// `dir` names.
std::vector<Channel> load_channels(const std::filesystem::path& dir,
                                   const LoadOptions& options = {});

std::vector<std::size_t> gold_parents(const Channel& channel);

}  // namespace untangle
