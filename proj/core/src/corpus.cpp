#include "untangle/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "untangle/error.hpp"
#include "untangle/irc_line.hpp"
#include "untangle/tokenize.hpp"

namespace untangle {

namespace {

constexpr int kMinutesPerDay = 24 * 60;

std::size_t parse_index(std::string_view text, std::size_t line_no) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line_no) + ": bad index \"" +
                     std::string(text) + "\"");
  }
  return value;
}

struct Record {
  std::size_t parent;
  std::size_t index;
  std::string raw;
};

Record split_record(const std::string& line, std::size_t line_no) {
  std::string_view rest(line);
  auto next_column = [&]() -> std::string_view {
    const auto tab = rest.find('\t');
    if (tab != std::string_view::npos) {
      auto col = rest.substr(0, tab);
      rest.remove_prefix(tab + 1);
      return col;
    }
    while (!rest.empty() && (rest.front() == ' ')) {
      rest.remove_prefix(1);
    }
    const auto space = rest.find(' ');
    if (space == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected three columns");
    }
    auto col = rest.substr(0, space);
    rest.remove_prefix(space + 1);
    return col;
  };
  const auto parent = parse_index(next_column(), line_no);
  const auto index = parse_index(next_column(), line_no);
  return Record{parent, index, std::string(rest)};
}

Message make_message(std::size_t index, std::string raw, std::size_t parent,
                     const LoadOptions& options) {
  IrcLine parsed = parse_irc_line(raw);
  Message m;
  m.index = index;
  m.speaker = std::move(parsed.speaker);
  m.time = parsed.time;
  m.is_system = parsed.is_system;
  m.target_nick = std::move(parsed.target_nick);
  m.gold_parent = parent;
  m.words = m.is_system ? tokenize("=== " + parsed.body)
                        : tokenize(m.speaker + ": " + parsed.body);
  if (m.words.size() > options.max_seq_len) {
    m.words.resize(options.max_seq_len);
  }
  m.raw = std::move(raw);
  return m;
}

void fold_day_rollovers(std::vector<Message>& messages) {
  int offset = 0;
  std::optional<int> last;
  for (auto& m : messages) {
    if (!m.time) {
      continue;
    }
    if (last && *m.time + offset < *last) {
      offset += kMinutesPerDay;
    }
    *m.time += offset;
    last = *m.time;
  }
}

void finish_channel(Channel& channel) {
  fold_day_rollovers(channel.messages);
  ReplyGraph graph{gold_parents(channel)};
  channel.gold_clusters = build_clusters(graph);
}

}  // namespace

std::vector<std::size_t> gold_parents(const Channel& channel) {
  std::vector<std::size_t> parents;
  parents.reserve(channel.size());
  for (const auto& m : channel.messages) {
    parents.push_back(m.gold_parent);
  }
  return parents;
}

Channel read_channel(std::istream& in, std::string name,
                     const LoadOptions& options, LoadReport* report) {
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    records.push_back(split_record(line, line_no));
  }
  if (records.empty()) {
    throw DataError(name + ": no messages");
  }

  LoadReport local;
  local.first_index = records.front().index;
  Channel channel;
  channel.name = std::move(name);
  channel.messages.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& r = records[i];
    if (r.index != local.first_index + i) {
      throw DataError(channel.name + ": index " + std::to_string(r.index) +
                      " breaks the consecutive sequence (expected " +
                      std::to_string(local.first_index + i) + ")");
    }
    if (r.parent > r.index) {
      throw DataError(channel.name + ": message " + std::to_string(r.index) +
                      " has later parent " + std::to_string(r.parent));
    }
    std::size_t parent = i;
    if (r.parent >= local.first_index) {
      parent = r.parent - local.first_index;
    } else {
      ++local.clamped_parents;
    }
    try {
      channel.messages.push_back(make_message(i, std::move(r.raw), parent, options));
    } catch (const ParseError& e) {
      throw ParseError(channel.name + ": index " + std::to_string(r.index) +
                       ": " + e.what());
    }
  }
  finish_channel(channel);
  if (report != nullptr) {
    *report = local;
  }
  return channel;
}

Channel load_annotated_channel(const std::filesystem::path& path,
                               const LoadOptions& options, LoadReport* report) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  return read_channel(in, path.filename().string(), options, report);
}

Channel make_channel(std::string name, const std::vector<std::string>& raw_lines,
                     const std::vector<std::size_t>& parents,
                     const LoadOptions& options) {
  if (raw_lines.size() != parents.size()) {
    throw DataError("make_channel: line and parent counts differ");
  }
  Channel channel;
  channel.name = std::move(name);
  for (std::size_t i = 0; i < raw_lines.size(); ++i) {
    if (parents[i] > i) {
      throw DataError("make_channel: message " + std::to_string(i) +
                      " has later parent");
    }
    channel.messages.push_back(make_message(i, raw_lines[i], parents[i], options));
  }
  finish_channel(channel);
  return channel;
}

void write_channel(std::ostream& out, const Channel& channel,
                   const std::vector<std::size_t>* parents) {
  for (const auto& m : channel.messages) {
    const auto parent = parents != nullptr ? parents->at(m.index) : m.gold_parent;
    out << parent << '\t' << m.index << '\t' << m.raw << '\n';
  }
}

void save_annotated_channel(const std::filesystem::path& path,
                            const Channel& channel,
                            const std::vector<std::size_t>* parents) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  write_channel(out, channel, parents);
}

std::vector<Channel> load_channels(const std::filesystem::path& dir,
                                   const LoadOptions& options) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir)) {
    throw DataError("no such file or directory: " + dir.string());
  }
  if (!fs::is_directory(dir)) {
    return {load_annotated_channel(dir, options)};
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw DataError("no channel files in " + dir.string());
  }
  std::vector<Channel> channels;
  channels.reserve(files.size());
  for (const auto& f : files) {
    channels.push_back(load_annotated_channel(f, options));
  }
  return channels;
}

}  // namespace untangle
