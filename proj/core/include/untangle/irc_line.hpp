#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace untangle {

/// Fields recovered from one raw IRC log line.
struct IrcLine {
  std::string speaker;
  std::optional<int> time;  // minutes since midnight
  std::string body;
  bool is_system = false;
  std::optional<std::string> target_nick;
};

/// Parses "[HH:MM] nick: body", "[HH:MM] * nick action" and "=== nick <event>"
/// lines. The timestamp is optional on chat lines. A body that opens with
/// "@nick", "@ nick", "nick," or "nick:" sets `target_nick`.
///
/// Throws ParseError naming the line when no pattern matches.
IrcLine parse_irc_line(std::string_view raw);

/// "[03:04]" -> 184. Returns nullopt for anything that is not a bracketed
/// 24-hour timestamp.
std::optional<int> parse_timestamp(std::string_view text);

}  // namespace untangle
