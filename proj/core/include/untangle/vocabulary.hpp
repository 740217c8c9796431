#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace untangle {

struct Channel;

using TokenId = int;

/// Token to id map with five reserved ids that never move.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kCls = 2;
  static constexpr TokenId kSep = 3;
  static constexpr TokenId kMask = 4;
  static constexpr std::size_t kNumReserved = 5;

  Vocabulary();

  /// Appends `token` if absent and returns its id.
  TokenId add(std::string_view token);

  TokenId id(std::string_view token) const;  // kUnk when absent
  const std::string& token(TokenId id) const;
  bool contains(std::string_view token) const;
  std::size_t size() const { return tokens_.size(); }

  std::vector<TokenId> encode(std::span<const std::string> words) const;

  /// One non-reserved token per line, in id order.
  void write(std::ostream& out) const;
  static Vocabulary read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

/// Counts message words over `channels`, keeps tokens seen at least
/// `min_count` times and assigns ids by (count desc, token asc).
Vocabulary build_vocab(std::span<const Channel> channels, std::size_t min_count);

}  // namespace untangle
