#include "untangle/stats.hpp"

#include <iomanip>
#include <ostream>
#include <set>
#include <string>

namespace untangle {

double CorpusStats::within_range_fraction() const {
  return messages == 0 ? 0.0
                       : static_cast<double>(within_range) / static_cast<double>(messages);
}

CorpusStats corpus_stats(std::span<const Channel> channels, std::size_t context_range,
                         std::size_t max_distance) {
  CorpusStats s;
  s.channels = channels.size();
  s.context_range = context_range;
  s.distance_counts.assign(max_distance + 1, 0);
  std::set<std::string> speakers;
  for (const auto& channel : channels) {
    for (const auto& m : channel.messages) {
      ++s.messages;
      if (!m.is_system) {
        speakers.insert(m.speaker);
      }
      const auto distance = m.index - m.gold_parent;
      if (distance == 0) {
        ++s.conversations;
      } else if (distance <= max_distance) {
        ++s.distance_counts[distance];
      } else {
        ++s.beyond;
      }
      if (distance < context_range) {
        ++s.within_range;
      }
    }
  }
  s.speakers = speakers.size();
  return s;
}

void write_stats(std::ostream& out, const CorpusStats& s) {
  out << "channels " << s.channels << '\n'
      << "messages " << s.messages << '\n'
      << "conversations " << s.conversations << '\n'
      << "speakers " << s.speakers << '\n'
      << "parent_within_" << s.context_range << ' ' << std::fixed << std::setprecision(4)
      << s.within_range_fraction() << '\n';
  out.unsetf(std::ios::floatfield);
  out << "# distance count\n";
  for (std::size_t d = 1; d < s.distance_counts.size(); ++d) {
    if (s.distance_counts[d] > 0) {
      out << d << ' ' << s.distance_counts[d] << '\n';
    }
  }
  if (s.beyond > 0) {
    out << ">" << s.distance_counts.size() - 1 << ' ' << s.beyond << '\n';
  }
}

}  // namespace untangle
