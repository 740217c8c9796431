#include "untangle/irc_line.hpp"

#include <cctype>

#include "untangle/error.hpp"

namespace untangle {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

// RFC 2812 nickname characters.
bool is_nick_char(char ch) {
  const auto c = static_cast<unsigned char>(ch);
  if (std::isalnum(c)) {
    return true;
  }
  switch (ch) {
    case '-': case '_': case '[': case ']': case '\\':
    case '`': case '^': case '{': case '}': case '|':
      return true;
    default:
      return false;
  }
}

std::size_t nick_length(std::string_view s) {
  std::size_t n = 0;
  while (n < s.size() && is_nick_char(s[n])) {
    ++n;
  }
  return n;
}

std::optional<std::string> addressed_nick(std::string_view body) {
  body = trim(body);
  if (body.empty()) {
    return std::nullopt;
  }
  if (body.front() == '@') {
    body.remove_prefix(1);
    body = trim(body);
    const auto n = nick_length(body);
    if (n == 0) {
      return std::nullopt;
    }
    return std::string(body.substr(0, n));
  }
  const auto n = nick_length(body);
  if (n == 0 || n >= body.size()) {
    return std::nullopt;
  }
  if (body[n] == ',' || body[n] == ':') {
    return std::string(body.substr(0, n));
  }
  return std::nullopt;
}

[[noreturn]] void fail(std::string_view raw) {
  throw ParseError("unrecognized IRC line: \"" + std::string(raw) + "\"");
}

}  // namespace

std::optional<int> parse_timestamp(std::string_view text) {
  if (text.size() != 7 || text[0] != '[' || text[3] != ':' || text[6] != ']') {
    return std::nullopt;
  }
  auto digit = [&](std::size_t i) -> int {
    const auto c = static_cast<unsigned char>(text[i]);
    return std::isdigit(c) ? c - '0' : -1;
  };
  const int h1 = digit(1), h2 = digit(2), m1 = digit(4), m2 = digit(5);
  if (h1 < 0 || h2 < 0 || m1 < 0 || m2 < 0) {
    return std::nullopt;
  }
  const int hours = h1 * 10 + h2;
  const int minutes = m1 * 10 + m2;
  if (hours > 23 || minutes > 59) {
    return std::nullopt;
  }
  return hours * 60 + minutes;
}

IrcLine parse_irc_line(std::string_view raw) {
  std::string_view rest = trim(raw);
  if (rest.empty()) {
    throw ParseError("empty IRC line");
  }

  IrcLine line;
  if (rest.front() == '[') {
    const auto close = rest.find(']');
    if (close == std::string_view::npos) {
      fail(raw);
    }
    line.time = parse_timestamp(rest.substr(0, close + 1));
    if (!line.time) {
      fail(raw);
    }
    rest = trim(rest.substr(close + 1));
  }

  if (rest.starts_with("===")) {
    rest = trim(rest.substr(3));
    const auto n = nick_length(rest);
    if (n == 0) {
      fail(raw);
    }
    line.speaker = std::string(rest.substr(0, n));
    line.body = std::string(trim(rest));
    line.is_system = true;
    return line;
  }

  if (rest.starts_with('*')) {
    // "/me" action: "* nick does something"
    rest = trim(rest.substr(1));
    const auto n = nick_length(rest);
    if (n == 0) {
      fail(raw);
    }
    line.speaker = std::string(rest.substr(0, n));
    line.body = std::string(trim(rest.substr(n)));
    return line;
  }

  const auto n = nick_length(rest);
  if (n == 0 || n >= rest.size() || rest[n] != ':') {
    fail(raw);
  }
  line.speaker = std::string(rest.substr(0, n));
  line.body = std::string(trim(rest.substr(n + 1)));
  line.target_nick = addressed_nick(line.body);
  return line;
}

}  // namespace untangle
