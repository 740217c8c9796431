#include "untangle/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>

#include "untangle/context_window.hpp"
#include "untangle/corpus.hpp"
#include "untangle/error.hpp"
#include "untangle/irc_line.hpp"
#include "untangle/tokenize.hpp"

namespace untangle {

namespace {

enum Feature : std::size_t {
  kPositionGap,
  kTimeGap,
  kSameSpeaker,
  kTargetAddressesCandidate,
  kCandidateAddressesTarget,
  kEitherSystem,
  kTargetSystem,
  kCandidateSystem,
  kTokenJaccard,
  kCandidateLength,
  kTargetLength,
  kTargetAddresses,
  kCandidateAddresses,
  kSelfPair,
  kRecent8,
};

constexpr std::size_t kRecentWindow = 8;

constexpr std::array<std::string_view, kNumPairFeatures> kSchema = {
    "position_gap_log1p",
    "time_gap_minutes_log1p",
    "same_speaker",
    "target_addresses_candidate_speaker",
    "candidate_addresses_target_speaker",
    "either_system",
    "target_system",
    "candidate_system",
    "token_jaccard",
    "candidate_length_log1p",
    "target_length_log1p",
    "target_addresses_someone",
    "candidate_addresses_someone",
    "self_pair",
    "candidate_in_last_8",
};

constexpr std::array<std::string_view, kNumPairFeatures> kDescriptions = {
    "log(1 + |target index - candidate index|)",
    "log(1 + |time difference|) in minutes; untimed lines inherit the last timestamp",
    "1 if both lines share a speaker",
    "1 if the target is addressed to the candidate's speaker",
    "1 if the candidate is addressed to the target's speaker",
    "1 if either line is a system line",
    "1 if the target is a system line",
    "1 if the candidate is a system line",
    "Jaccard overlap of the two messages' body token sets (speaker prefix excluded)",
    "log(1 + candidate token count)",
    "log(1 + target token count)",
    "1 if the target is addressed to any nick",
    "1 if the candidate is addressed to any nick",
    "1 if candidate and target are the same line",
    "1 if the candidate is one of the 8 lines before the target",
};

// Nearest timestamp at or before `index`, falling back to the first later one.
std::optional<int> effective_time(const Channel& channel, std::size_t index) {
  for (std::size_t i = index + 1; i-- > 0;) {
    if (channel.messages[i].time) {
      return channel.messages[i].time;
    }
  }
  for (std::size_t i = index + 1; i < channel.size(); ++i) {
    if (channel.messages[i].time) {
      return channel.messages[i].time;
    }
  }
  return std::nullopt;
}

bool nick_equal(const std::optional<std::string>& nick, const std::string& speaker) {
  if (!nick) {
    return false;
  }
  return std::equal(nick->begin(), nick->end(), speaker.begin(), speaker.end(),
                    [](char a, char b) {
                      return std::tolower(static_cast<unsigned char>(a)) ==
                             std::tolower(static_cast<unsigned char>(b));
                    });
}

// Message text without the speaker prefix, so the shared ":" of every chat
// line does not count as overlap.
std::vector<std::string> body_tokens(const Message& m) {
  return tokenize(parse_irc_line(m.raw).body);
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::unordered_set<std::string> sa(a.begin(), a.end());
  const std::unordered_set<std::string> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) {
    return 0.0;
  }
  std::size_t common = 0;
  for (const auto& t : sa) {
    common += sb.contains(t) ? 1 : 0;
  }
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

double flag(bool b) { return b ? 1.0 : 0.0; }

}  // namespace

const std::array<std::string_view, kNumPairFeatures>& feature_schema() {
  return kSchema;
}

void write_feature_schema(std::ostream& out) {
  out << "# pair feature schema, one feature per line: position<TAB>name<TAB>description\n";
  for (std::size_t i = 0; i < kNumPairFeatures; ++i) {
    out << i << '\t' << kSchema[i] << '\t' << kDescriptions[i] << '\n';
  }
}

FeatureVector extract_pair_features(const Channel& channel,
                                    std::size_t target_index,
                                    std::size_t candidate_index) {
  if (target_index >= channel.size() || candidate_index >= channel.size()) {
    throw DataError("extract_pair_features: index out of range for channel " +
                    channel.name);
  }
  const auto& t = channel.messages[target_index];
  const auto& c = channel.messages[candidate_index];
  const auto gap = target_index > candidate_index ? target_index - candidate_index
                                                  : candidate_index - target_index;

  double time_gap = 0.0;
  const auto tt = effective_time(channel, target_index);
  const auto tc = effective_time(channel, candidate_index);
  if (tt && tc) {
    time_gap = std::abs(static_cast<double>(*tt - *tc));
  }

  FeatureVector f;
  f[kPositionGap] = std::log1p(static_cast<double>(gap));
  f[kTimeGap] = std::log1p(time_gap);
  f[kSameSpeaker] = flag(t.speaker == c.speaker);
  f[kTargetAddressesCandidate] = flag(nick_equal(t.target_nick, c.speaker));
  f[kCandidateAddressesTarget] = flag(nick_equal(c.target_nick, t.speaker));
  f[kEitherSystem] = flag(t.is_system || c.is_system);
  f[kTargetSystem] = flag(t.is_system);
  f[kCandidateSystem] = flag(c.is_system);
  f[kTokenJaccard] = jaccard(body_tokens(t), body_tokens(c));
  f[kCandidateLength] = std::log1p(static_cast<double>(c.words.size()));
  f[kTargetLength] = std::log1p(static_cast<double>(t.words.size()));
  f[kTargetAddresses] = flag(t.target_nick.has_value());
  f[kCandidateAddresses] = flag(c.target_nick.has_value());
  f[kSelfPair] = flag(target_index == candidate_index);
  f[kRecent8] = flag(candidate_index < target_index && gap <= kRecentWindow);
  return f;
}

std::vector<FeatureVector> featurize_batch(const Channel& channel,
                                           const PairBatch& batch) {
  std::vector<FeatureVector> rows(batch.num_slots());
  for (std::size_t s = 0; s < batch.num_slots(); ++s) {
    if (batch.valid_mask[s]) {
      rows[s] = extract_pair_features(channel, batch.target_index,
                                      batch.candidate_indices[s]);
    }
  }
  return rows;
}

}  // namespace untangle
