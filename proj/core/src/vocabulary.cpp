#include "untangle/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "untangle/corpus.hpp"
#include "untangle/error.hpp"

namespace untangle {

Vocabulary::Vocabulary() {
  for (const char* t : {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"}) {
    add(t);
  }
}

TokenId Vocabulary::add(std::string_view token) {
  std::string key(token);
  if (auto it = ids_.find(key); it != ids_.end()) {
    return it->second;
  }
  const auto id = static_cast<TokenId>(tokens_.size());
  tokens_.push_back(key);
  ids_.emplace(std::move(key), id);
  return id;
}

TokenId Vocabulary::id(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  return tokens_.at(static_cast<std::size_t>(id));
}

bool Vocabulary::contains(std::string_view token) const {
  return ids_.contains(std::string(token));
}

std::vector<TokenId> Vocabulary::encode(std::span<const std::string> words) const {
  std::vector<TokenId> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    out.push_back(id(w));
  }
  return out;
}

void Vocabulary::write(std::ostream& out) const {
  for (std::size_t i = kNumReserved; i < tokens_.size(); ++i) {
    out << tokens_[i] << '\n';
  }
}

Vocabulary Vocabulary::read(std::istream& in) {
  Vocabulary v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    if (v.contains(line)) {
      throw ParseError("duplicate vocabulary token \"" + line + "\"");
    }
    v.add(line);
  }
  return v;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write " + path.string());
  }
  write(out);
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  return read(in);
}

Vocabulary build_vocab(std::span<const Channel> channels, std::size_t min_count) {
  if (min_count < 1) {
    throw DataError("build_vocab: min_count must be at least 1");
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& channel : channels) {
    for (const auto& m : channel.messages) {
      for (const auto& w : m.words) {
        ++counts[w];
      }
    }
  }
  if (counts.empty()) {
    throw DataError("build_vocab: empty corpus");
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;  // ties stay in token order from the map
  });
  Vocabulary vocab;
  for (const auto& [token, count] : ranked) {
    if (count >= min_count && !vocab.contains(token)) {
      vocab.add(token);
    }
  }
  return vocab;
}

}  // namespace untangle
