#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace untangle {

/// Lower-cases `text` and splits it into word tokens. Runs of letters, digits
/// and non-ASCII bytes form one token; every other non-space character is a
/// token on its own.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace untangle
