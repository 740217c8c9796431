#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace untangle {

/// Flat key=value settings. Blank lines and lines starting with '#' are
/// ignored; keys and values are trimmed. A repeated key is a ParseError.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, std::string_view source = "config");
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(std::string key, std::string value);
  bool contains(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  std::optional<double> get_double(std::string_view key) const;
  std::optional<std::size_t> get_size(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;  // on/off, true/false, 1/0

  /// Keys not in `known`, for reporting typos.
  std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;
  const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

/// Value for a setting: the flag when given, else the config entry, else the
/// built-in default.
template <class T>
T resolve_setting(const std::optional<T>& flag, const std::optional<T>& from_config,
                  const T& fallback) {
  if (flag) {
    return *flag;
  }
  if (from_config) {
    return *from_config;
  }
  return fallback;
}

bool parse_switch(std::string_view text);  // on/off, true/false, yes/no, 1/0

}  // namespace untangle
