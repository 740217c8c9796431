#include <doctest.h>

#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "sample_data.hpp"
#include "untangle/context_window.hpp"
#include "untangle/corpus.hpp"
#include "untangle/error.hpp"
#include "untangle/irc_line.hpp"
#include "untangle/tokenize.hpp"
#include "untangle/vocabulary.hpp"

using namespace untangle;

namespace {

Channel sample_channel(LoadReport* report = nullptr) {
  std::istringstream in(kUbuntuSample);
  return read_channel(in, "ubuntu-sample", {}, report);
}

// n one-word chat lines forming a single chain.
Channel chain_channel(std::size_t n) {
  std::vector<std::string> lines;
  std::vector<std::size_t> parents;
  for (std::size_t i = 0; i < n; ++i) {
    lines.push_back("u" + std::to_string(i % 3) + ": word" + std::to_string(i));
    parents.push_back(i == 0 ? 0 : i - 1);
  }
  return make_channel("chain", lines, parents);
}

}  // namespace

TEST_CASE("tokenize lower-cases and splits punctuation") {
  const auto t = tokenize("Hello, World! it's 16MB");
  const std::vector<std::string> want = {"hello", ",", "world", "!", "it", "'", "s", "16mb"};
  CHECK(t == want);
  CHECK(tokenize("   ").empty());
}

TEST_CASE("parse_irc_line: addressed chat line") {
  const auto l = parse_irc_line("[03:04] Amaranth: @cliche American");
  CHECK(l.speaker == "Amaranth");
  REQUIRE(l.time.has_value());
  CHECK(*l.time == 184);
  REQUIRE(l.target_nick.has_value());
  CHECK(*l.target_nick == "cliche");
  CHECK_FALSE(l.is_system);
  CHECK(l.body == "@cliche American");
}

TEST_CASE("parse_irc_line: system join line") {
  const auto l = parse_irc_line("=== welshbyte  has joined #ubuntu");
  CHECK(l.speaker == "welshbyte");
  CHECK(l.is_system);
  CHECK_FALSE(l.time.has_value());
  const auto timed = parse_irc_line("[23:59] === bob has joined #x");
  CHECK(timed.is_system);
  CHECK(timed.time == 23 * 60 + 59);
}

TEST_CASE("parse_irc_line: addressing variants and errors") {
  CHECK(parse_irc_line("a: bob, try this").target_nick == "bob");
  CHECK(parse_irc_line("a: bob: try this").target_nick == "bob");
  CHECK(parse_irc_line("a: @ Amaranth, hahahaha").target_nick == "Amaranth");
  CHECK_FALSE(parse_irc_line("a: no address here").target_nick.has_value());
  CHECK(parse_irc_line("* bob waves").speaker == "bob");
  CHECK_THROWS_AS(parse_irc_line(""), ParseError);
  CHECK_THROWS_AS(parse_irc_line("   "), ParseError);
  CHECK_THROWS_AS(parse_irc_line("no colon anywhere"), ParseError);
  CHECK_THROWS_AS(parse_irc_line("[25:00] a: b"), ParseError);
}

TEST_CASE("parse_timestamp") {
  CHECK(parse_timestamp("[00:00]") == 0);
  CHECK(parse_timestamp("[03:04]") == 184);
  CHECK_FALSE(parse_timestamp("[3:04]").has_value());
  CHECK_FALSE(parse_timestamp("[12:60]").has_value());
}

TEST_CASE("the 14-row sample loads with remapped indices") {
  LoadReport report;
  const auto ch = sample_channel(&report);
  REQUIRE(ch.size() == 14);
  CHECK(report.first_index == 1000);
  // 1000, 1001, 1004 and 1005 point before the excerpt.
  CHECK(report.clamped_parents == 4);
  CHECK(ch.messages[3].gold_parent == 3);  // 1003: join line starts its own conversation
  CHECK(ch.messages[3].is_system);
  CHECK(ch.messages[9].gold_parent == 7);  // 1009 -> 1007
  CHECK(ch.messages[11].gold_parent == 7);  // 1011 -> 1007
  for (const auto& m : ch.messages) {
    CHECK(m.gold_parent <= m.index);
  }
  const auto& a = ch.gold_clusters.assignment;
  CHECK(a[4] == a[7]);
  CHECK(a[7] == a[9]);
  CHECK(a[9] == a[11]);
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (i != 3) {
      CHECK(a[i] != a[3]);
    }
  }
}

TEST_CASE("annotated channel round-trips through write/read") {
  const auto ch = sample_channel();
  std::ostringstream out;
  write_channel(out, ch);
  std::istringstream in(out.str());
  const auto again = read_channel(in, ch.name);
  CHECK(again == ch);
}

TEST_CASE("minimal and malformed files") {
  std::istringstream one("0\t0\t[10:00] solo: hi\n");
  const auto ch = read_channel(one, "one");
  CHECK(ch.size() == 1);
  CHECK(ch.gold_clusters.num_clusters() == 1);

  std::istringstream later("0\t0\ta: x\n2\t1\tb: y\n");
  CHECK_THROWS_AS(read_channel(later, "bad"), DataError);
  std::istringstream gap("0\t0\ta: x\n0\t2\tb: y\n");
  CHECK_THROWS_AS(read_channel(gap, "bad"), DataError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_channel(empty, "bad"), DataError);
  std::istringstream spaces("5 5 a: x\n5 6 b: y\n");
  CHECK(read_channel(spaces, "ws").messages[1].gold_parent == 0);
}

TEST_CASE("day rollover adds 1440 minutes") {
  const auto ch = make_channel("night", {"[23:58] a: x", "[00:01] b: y", "c: z"}, {0, 0, 1});
  CHECK(ch.messages[0].time == 23 * 60 + 58);
  CHECK(ch.messages[1].time == 1440 + 1);
  CHECK_FALSE(ch.messages[2].time.has_value());
}

TEST_CASE("message tokens respect max_seq_len") {
  std::string body;
  for (int i = 0; i < 50; ++i) {
    body += " w" + std::to_string(i);
  }
  LoadOptions opts;
  opts.max_seq_len = 20;
  const auto ch = make_channel("long", {"a:" + body}, {0}, opts);
  CHECK(ch.messages[0].words.size() == 20);
}

TEST_CASE("build_vocab counting, threshold and determinism") {
  const auto ch = make_channel("v", {"x: a b", "x: a"}, {0, 0});
  const std::vector<Channel> corpus = {ch};
  const auto v1 = build_vocab(corpus, 1);
  // "x", ":" and "a" occur twice; ties are broken alphabetically.
  CHECK(v1.token(5) == ":");
  CHECK(v1.token(6) == "a");
  CHECK(v1.token(7) == "x");
  CHECK(v1.token(8) == "b");
  const auto v2 = build_vocab(corpus, 2);
  CHECK(v2.id("b") == Vocabulary::kUnk);
  CHECK(v2.id("a") != Vocabulary::kUnk);

  std::ostringstream s1, s2;
  v1.write(s1);
  build_vocab(corpus, 1).write(s2);
  CHECK(s1.str() == s2.str());
  std::istringstream in(s1.str());
  CHECK(Vocabulary::read(in) == v1);
  CHECK_THROWS_AS(build_vocab(std::vector<Channel>{}, 1), DataError);
  CHECK_THROWS_AS(build_vocab(corpus, 0), DataError);
}

TEST_CASE("reserved ids are fixed") {
  Vocabulary v;
  CHECK(v.size() == Vocabulary::kNumReserved);
  const std::set<TokenId> ids = {Vocabulary::kPad, Vocabulary::kUnk, Vocabulary::kCls,
                                 Vocabulary::kSep, Vocabulary::kMask};
  CHECK(ids.size() == 5);
  CHECK(v.id("never-seen") == Vocabulary::kUnk);
}

TEST_CASE("context window slots") {
  const auto ch = chain_channel(120);
  const std::vector<Channel> corpus = {ch};
  const auto vocab = build_vocab(corpus, 1);
  WindowConfig w;
  w.context_range = 50;

  const auto b = build_context_window(ch, vocab, 100, w);
  REQUIRE(b.num_slots() == 50);
  CHECK(b.num_valid() == 50);
  for (std::size_t s = 0; s < 50; ++s) {
    CHECK(b.candidate_indices[s] == 100 - s);
  }
  CHECK(b.parent_slot == 1);
  CHECK(b.conv_labels[1]);
  CHECK_FALSE(b.conv_labels[0]);
  CHECK(b.pair_tokens[0].front() == Vocabulary::kCls);

  const auto early = build_context_window(ch, vocab, 3, w);
  CHECK(early.num_valid() == 4);
  CHECK(early.num_slots() == 50);
  CHECK(early.pair_tokens[10].empty());

  w.future = 10;
  const auto fut = build_context_window(ch, vocab, 100, w);
  REQUIRE(fut.num_slots() == 60);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(fut.candidate_indices[50 + k] == 101 + k);
    CHECK(fut.is_future_slot(50 + k));
  }
  const auto tail = build_context_window(ch, vocab, 115, w);
  CHECK(tail.num_valid() == 50 + 4);

  const auto start = build_context_window(ch, vocab, 0, w);
  CHECK(start.parent_slot == 0);
  CHECK(start.conv_labels[0]);
}

TEST_CASE("valid slot count matches the closed form") {
  const auto ch = chain_channel(40);
  const std::vector<Channel> corpus = {ch};
  const auto vocab = build_vocab(corpus, 1);
  for (std::size_t t_range : {1u, 3u, 7u, 50u}) {
    for (std::size_t fut : {0u, 2u, 10u}) {
      WindowConfig w;
      w.context_range = t_range;
      w.future = fut;
      for (std::size_t target = 0; target < ch.size(); ++target) {
        const auto b = build_context_window(ch, vocab, target, w);
        const auto want = std::min(t_range, target + 1) + std::min(fut, ch.size() - 1 - target);
        CHECK(b.num_valid() == want);
        CHECK(b.valid_mask[0]);
      }
    }
  }
}

TEST_CASE("gold parent outside the window") {
  const auto ch = make_channel("far", {"a: x", "b: y", "c: z", "d: w", "a: again"},
                               {0, 1, 2, 3, 0});
  const std::vector<Channel> corpus = {ch};
  const auto vocab = build_vocab(corpus, 1);
  WindowConfig w;
  w.context_range = 3;
  const auto b = build_context_window(ch, vocab, 4, w);
  CHECK_FALSE(b.parent_in_window);
  CHECK(b.parent_slot == 0);
  w.context_range = 5;
  const auto ok = build_context_window(ch, vocab, 4, w);
  CHECK(ok.parent_in_window);
  CHECK(ok.parent_slot == 4);
}

TEST_CASE("pair truncation trims the candidate first with a floor of five") {
  std::vector<TokenId> target(30, 10), candidate(30, 11);
  auto p = make_pair_tokens(target, candidate, 40);
  CHECK(p.size() == 40);
  CHECK(std::count(p.begin(), p.end(), 10) == 30);
  CHECK(std::count(p.begin(), p.end(), 11) == 7);
  p = make_pair_tokens(target, candidate, 20);
  CHECK(p.size() == 20);
  CHECK(std::count(p.begin(), p.end(), 11) == 5);
  CHECK(std::count(p.begin(), p.end(), 10) == 12);
  CHECK(p.front() == Vocabulary::kCls);
  CHECK(p.back() == Vocabulary::kSep);
  WindowConfig w;
  w.max_seq_len = 12;
  CHECK_THROWS_AS(w.validate(), DataError);
}

TEST_CASE("recency order puts the nearest preceding message first") {
  const auto ch = chain_channel(10);
  const std::vector<Channel> corpus = {ch};
  const auto vocab = build_vocab(corpus, 1);
  WindowConfig w;
  w.context_range = 4;
  w.future = 2;
  const auto b = build_context_window(ch, vocab, 5, w);
  const std::vector<std::size_t> want = {1, 2, 3, 0, 4, 5};
  CHECK(recency_order(b) == want);
}
