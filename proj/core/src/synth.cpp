#include "untangle/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>

#include "untangle/error.hpp"

namespace untangle {
namespace {

constexpr std::array<const char*, 20> kOnsets = {
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r",
    "s", "t", "v", "z", "br", "kr", "st", "pl", "tr", "sn"};
constexpr std::array<const char*, 5> kVowels = {"a", "e", "i", "o", "u"};
constexpr std::array<const char*, 6> kCodas = {"", "n", "x", "r", "k", "th"};

constexpr std::array<const char*, 24> kFiller = {
    "the", "it", "i", "you", "to", "is", "that", "with", "on", "my",
    "but", "not", "works", "try", "did", "when", "then", "also", "now", "yes",
    "maybe", "still", "same", "here"};
constexpr std::array<const char*, 4> kStartCues = {"anyone", "hey all", "question", "help"};
constexpr std::array<const char*, 4> kReplyCues = {"ok", "so", "hmm", "right"};

template <class T, std::size_t N>
const char* pick(const std::array<T, N>& items, std::mt19937_64& rng) {
  return items[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

std::string pseudo_word(std::mt19937_64& rng, std::size_t syllables) {
  std::string w;
  for (std::size_t s = 0; s < syllables; ++s) {
    w += pick(kOnsets, rng);
    w += pick(kVowels, rng);
  }
  w += pick(kCodas, rng);
  return w;
}

/// `count` distinct pseudo-words that are also absent from `taken`.
std::vector<std::string> fresh_words(std::mt19937_64& rng, std::size_t count,
                                     std::size_t syllables, std::set<std::string>& taken) {
  std::vector<std::string> out;
  while (out.size() < count) {
    auto w = pseudo_word(rng, syllables);
    if (taken.insert(w).second) {
      out.push_back(std::move(w));
    }
  }
  return out;
}

std::string clock(int minutes) {
  const int m = ((minutes % 1440) + 1440) % 1440;
  char buf[16];
  std::snprintf(buf, sizeof buf, "[%02d:%02d]", m / 60, m % 60);
  return buf;
}

struct Line {
  std::string speaker;
  std::vector<std::string> keywords;
};

struct Conversation {
  std::vector<std::string> theme;
  std::vector<std::string> speakers;
  std::vector<std::size_t> lines;  // channel indices emitted so far
  std::size_t remaining = 0;
};

}  // namespace

void SynthConfig::validate() const {
  if (channels == 0 || conversations == 0 || messages == 0) {
    throw DataError("synth: channels, conversations and messages must be positive");
  }
  if (conversations > themes) {
    throw DataError("synth: " + std::to_string(conversations) +
                    " conversations per channel need at least as many themes (got " +
                    std::to_string(themes) + ")");
  }
  if (keywords_per_theme < 3) {
    throw DataError("synth: keywords_per_theme must be at least 3");
  }
  if (speakers_per_conversation == 0) {
    throw DataError("synth: speakers_per_conversation must be positive");
  }
  for (const double rate : {join_rate, address_rate, reach_back_rate}) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw DataError("synth: rates must lie in [0, 1]");
    }
  }
  if (!(mean_gap_minutes > 0.0)) {
    throw DataError("synth: mean_gap_minutes must be positive");
  }
}

std::vector<Channel> generate_corpus(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::set<std::string> taken(kFiller.begin(), kFiller.end());
  for (const auto* cue : kStartCues) {
    taken.insert(cue);
  }
  std::vector<std::vector<std::string>> themes;
  for (std::size_t t = 0; t < config.themes; ++t) {
    themes.push_back(fresh_words(rng, config.keywords_per_theme, 2, taken));
  }
  const std::size_t nick_pool_size =
      std::max<std::size_t>(64, 2 * config.conversations * config.speakers_per_conversation);
  auto nicks = fresh_words(rng, nick_pool_size, 1, taken);
  for (std::size_t i = 0; i < nicks.size(); ++i) {
    nicks[i] += std::to_string(i % 10);
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> gap(1.0 / config.mean_gap_minutes);
  std::vector<Channel> corpus;
  for (std::size_t c = 0; c < config.channels; ++c) {
    std::vector<std::size_t> theme_ids(themes.size());
    for (std::size_t i = 0; i < theme_ids.size(); ++i) {
      theme_ids[i] = i;
    }
    std::shuffle(theme_ids.begin(), theme_ids.end(), rng);
    std::vector<std::string> pool = nicks;
    std::shuffle(pool.begin(), pool.end(), rng);

    std::vector<Conversation> convs(config.conversations);
    for (std::size_t k = 0; k < convs.size(); ++k) {
      convs[k].theme = themes[theme_ids[k]];
      const auto first = pool.begin() + static_cast<std::ptrdiff_t>(
                                            (k * config.speakers_per_conversation) % pool.size());
      for (std::size_t s = 0; s < config.speakers_per_conversation; ++s) {
        convs[k].speakers.push_back(*(first + static_cast<std::ptrdiff_t>(s)));
      }
      convs[k].remaining = config.messages;
    }

    std::vector<std::string> raw;
    std::vector<std::size_t> parents;
    std::vector<Line> lines;
    double now = std::uniform_int_distribution<int>(0, 1439)(rng);
    std::size_t left = config.conversations * config.messages;
    while (left > 0) {
      now += gap(rng);
      if (unit(rng) < config.join_rate) {
        const auto& who = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
        raw.push_back(clock(static_cast<int>(now)) + " === " + who + " [~" + who +
                      "@host] has joined #synth");
        parents.push_back(raw.size() - 1);
        lines.push_back({});
        now += gap(rng);
      }
      // Choose a live conversation weighted by how much it has left to say.
      std::size_t draw = std::uniform_int_distribution<std::size_t>(0, left - 1)(rng);
      std::size_t k = 0;
      while (draw >= convs[k].remaining) {
        draw -= convs[k].remaining;
        ++k;
      }
      auto& conv = convs[k];
      const std::size_t index = raw.size();
      auto kw = [&] {
        return conv.theme[std::uniform_int_distribution<std::size_t>(0, conv.theme.size() - 1)(rng)];
      };
      Line line;
      std::string body;
      std::size_t parent = index;
      if (conv.lines.empty()) {
        line.speaker = conv.speakers[0];
        body = pick(kStartCues, rng);
        while (line.keywords.size() < 3) {
          auto w = kw();
          if (std::find(line.keywords.begin(), line.keywords.end(), w) == line.keywords.end()) {
            line.keywords.push_back(w);
          }
        }
      } else {
        std::size_t back = 1;
        if (conv.lines.size() > 1 && unit(rng) < config.reach_back_rate) {
          back = std::uniform_int_distribution<std::size_t>(
              2, std::min<std::size_t>(4, conv.lines.size()))(rng);
        }
        parent = conv.lines[conv.lines.size() - back];
        const Line& up = lines[parent];
        std::vector<std::string> others;
        for (const auto& s : conv.speakers) {
          if (s != up.speaker) {
            others.push_back(s);
          }
        }
        line.speaker = others.empty() || unit(rng) < 0.2
                           ? up.speaker
                           : others[std::uniform_int_distribution<std::size_t>(
                                 0, others.size() - 1)(rng)];
        const bool addressed =
            line.speaker != up.speaker && (back > 1 || unit(rng) < config.address_rate);
        body = addressed ? up.speaker + ": " + pick(kReplyCues, rng) : pick(kReplyCues, rng);
        line.keywords.push_back(
            up.keywords[std::uniform_int_distribution<std::size_t>(0, up.keywords.size() - 1)(rng)]);
        const auto extra = std::uniform_int_distribution<int>(1, 2)(rng);
        for (int e = 0; e < extra; ++e) {
          line.keywords.push_back(kw());
        }
      }
      std::vector<std::string> words = line.keywords;
      const auto fillers = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int f = 0; f < fillers; ++f) {
        words.push_back(pick(kFiller, rng));
      }
      std::shuffle(words.begin(), words.end(), rng);
      for (const auto& w : words) {
        body += ' ';
        body += w;
      }
      raw.push_back(clock(static_cast<int>(now)) + ' ' + line.speaker + ": " + body);
      parents.push_back(parent);
      lines.push_back(std::move(line));
      conv.lines.push_back(index);
      --conv.remaining;
      --left;
    }
    char name[32];
    std::snprintf(name, sizeof name, "synth-%03zu", c);
    corpus.push_back(make_channel(name, raw, parents));
  }
  return corpus;
}

}  // namespace untangle
