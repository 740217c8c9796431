#include "untangle/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

#include "untangle/error.hpp"

namespace untangle {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

bool parse_switch(std::string_view text) {
  if (text == "on" || text == "true" || text == "yes" || text == "1") {
    return true;
  }
  if (text == "off" || text == "false" || text == "no" || text == "0") {
    return false;
  }
  throw ParseError("expected on/off, got \"" + std::string(text) + "\"");
}

KeyValueConfig KeyValueConfig::parse(std::istream& in, std::string_view source) {
  KeyValueConfig cfg;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    const auto eq = text.find('=');
    const auto where = std::string(source) + ":" + std::to_string(number);
    if (eq == std::string::npos) {
      throw ParseError(where + ": expected key=value, got \"" + text + "\"");
    }
    auto key = trim(std::string_view(text).substr(0, eq));
    if (key.empty()) {
      throw ParseError(where + ": empty key");
    }
    if (cfg.contains(key)) {
      throw ParseError(where + ": duplicate key \"" + key + "\"");
    }
    cfg.set(std::move(key), trim(std::string_view(text).substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open config file " + path.string());
  }
  return parse(in, path.string());
}

void KeyValueConfig::set(std::string key, std::string value) {
  entries_[std::move(key)] = std::move(value);
}

bool KeyValueConfig::contains(std::string_view key) const {
  return entries_.find(key) != entries_.end();
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<double> KeyValueConfig::get_double(std::string_view key) const {
  const auto v = get(key);
  if (!v) {
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(*v, &used);
    if (used == v->size()) {
      return d;
    }
  } catch (const std::exception&) {
  }
  throw ParseError("config key \"" + std::string(key) + "\" is not a number: " + *v);
}

std::optional<std::size_t> KeyValueConfig::get_size(std::string_view key) const {
  const auto v = get(key);
  if (!v) {
    return std::nullopt;
  }
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw ParseError("config key \"" + std::string(key) +
                     "\" is not a non-negative integer: " + *v);
  }
  return out;
}

std::optional<bool> KeyValueConfig::get_bool(std::string_view key) const {
  const auto v = get(key);
  if (!v) {
    return std::nullopt;
  }
  try {
    return parse_switch(*v);
  } catch (const ParseError&) {
    throw ParseError("config key \"" + std::string(key) + "\" expects on/off: " + *v);
  }
}

std::vector<std::string> KeyValueConfig::unknown_keys(
    const std::vector<std::string>& known) const {
  std::vector<std::string> out;
  for (const auto& [key, value] : entries_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      out.push_back(key);
    }
  }
  return out;
}

}  // namespace untangle
