#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = UNTANGLE_CLI_PATH;

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("untangle-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args, const fs::path& dir) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd =
      "\"" + kCli + "\" " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::size_t count_lines(const std::string& text, const std::string& needle = "") {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.find(needle) != std::string::npos) {
      ++n;
    }
  }
  return n;
}

// Parses a JSON-lines epoch log.
std::vector<nlohmann::json> read_log(const fs::path& p) {
  std::vector<nlohmann::json> out;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

std::string dir_text(const fs::path& dir) {
  std::string all;
  for (const auto& e : fs::directory_iterator(dir)) {
    all += slurp(e.path());
  }
  return all;
}

}  // namespace

TEST_CASE("synth is deterministic and sized as asked") {
  const auto dir = scratch("synth");
  REQUIRE(run("synth --out " + (dir / "a").string() +
                  " --seed 3 --channels 1 --conversations 2 --messages 20 --join-rate 0",
              dir).status == 0);
  REQUIRE(run("synth --out " + (dir / "b").string() +
                  " --seed 3 --channels 1 --conversations 2 --messages 20 --join-rate 0",
              dir).status == 0);
  const auto a = dir_text(dir / "a");
  CHECK(a == dir_text(dir / "b"));
  CHECK(count_lines(a) == 40);
  std::istringstream in(a);
  std::size_t self_links = 0;
  for (std::string line; std::getline(in, line);) {
    std::istringstream row(line);
    std::size_t parent = 0, index = 0;
    row >> parent >> index;
    self_links += parent == index ? 1 : 0;
  }
  CHECK(self_links == 2);
}

TEST_CASE("synth rejects impossible parameters") {
  const auto dir = scratch("synth-bad");
  const auto r = run("synth --out " + (dir / "x").string() + " --conversations 5 --themes 4", dir);
  CHECK(r.status != 0);
  CHECK(r.err.find("error:") == 0);
  CHECK(r.err.find("themes") != std::string::npos);
}

TEST_CASE("train, predict and evaluate round trip") {
  const auto dir = scratch("roundtrip");
  REQUIRE(run("synth --out " + (dir / "data").string() + " --seed 5 --channels 2", dir).status == 0);
  const auto model = (dir / "lin.ckpt").string();
  const auto t = run("train --kind linear --epochs 2 --data " + (dir / "data").string() +
                         " --model " + model,
                     dir);
  REQUIRE(t.status == 0);
  CHECK(fs::exists(model));
  const auto log = read_log(model + ".log");
  REQUIRE(log.size() == 2);
  CHECK(log[1]["epoch"] == 2);
  CHECK(log[1]["loss"].get<double>() > 0.0);
  CHECK(log[1].contains("dev_accuracy"));
  REQUIRE(run("predict --data " + (dir / "data").string() + " --model " + model + " --out " +
                  (dir / "pred").string(),
              dir).status == 0);
  const auto e = run("evaluate --format kv --gold " + (dir / "data").string() + " --pred " +
                         (dir / "pred").string(),
                     dir);
  REQUIRE(e.status == 0);
  CHECK(e.out.find("VI=") != std::string::npos);
  CHECK(e.out.find("F1=") != std::string::npos);

  const auto g = run("evaluate --format kv --gold " + (dir / "data").string() + " --pred " +
                         (dir / "data").string(),
                     dir);
  CHECK(g.out.find("ARI=100.00") != std::string::npos);
}

TEST_CASE("flags override the config file, which overrides defaults") {
  const auto dir = scratch("config");
  REQUIRE(run("synth --out " + (dir / "data").string() + " --channels 1", dir).status == 0);
  {
    std::ofstream cfg(dir / "train.cfg");
    cfg << "# toy settings\nkind = linear\nepochs = 3\nlr_decay = on\n";
  }
  const auto base = "train --data " + (dir / "data").string() + " --config " +
                    (dir / "train.cfg").string() + " --model ";
  REQUIRE(run(base + (dir / "a").string(), dir).status == 0);
  CHECK(read_log(dir / "a.log").size() == 3);
  REQUIRE(run(base + (dir / "b").string() + " --epochs 1", dir).status == 0);
  CHECK(read_log(dir / "b.log").size() == 1);

  {
    std::ofstream cfg(dir / "typo.cfg");
    cfg << "epoch = 3\n";
  }
  const auto r = run("train --data " + (dir / "data").string() + " --config " +
                         (dir / "typo.cfg").string() + " --model " + (dir / "c").string(),
                     dir);
  CHECK(r.status != 0);
  CHECK(r.err.find("epoch") != std::string::npos);
}

TEST_CASE("stats reports counts and the window coverage") {
  const auto dir = scratch("stats");
  REQUIRE(run("synth --out " + (dir / "data").string() +
                  " --channels 2 --conversations 2 --messages 10 --join-rate 0",
              dir).status == 0);
  const auto r = run("stats --data " + (dir / "data").string(), dir);
  REQUIRE(r.status == 0);
  CHECK(r.out.find("messages 40") != std::string::npos);
  CHECK(r.out.find("conversations 4") != std::string::npos);
  CHECK(r.out.find("parent_within_50 1") != std::string::npos);
}

TEST_CASE("failures exit non-zero with a message") {
  const auto dir = scratch("fail");
  const auto missing = run("predict --data " + dir.string() + " --model " +
                               (dir / "none.ckpt").string() + " --out " + (dir / "o").string(),
                           dir);
  CHECK(missing.status != 0);
  CHECK(missing.err.find("error:") != std::string::npos);
  CHECK(run("evaluate --gold " + dir.string(), dir).status != 0);
  CHECK(run("ensemble --strategy median --models a,b --data . --out o", dir).status != 0);
  CHECK(run("no-such-command", dir).status != 0);
}

TEST_CASE("feature schema dump") {
  const auto dir = scratch("schema");
  REQUIRE(run("--dump-feature-schema " + (dir / "schema.txt").string(), dir).status == 0);
  const auto text = slurp(dir / "schema.txt");
  CHECK(text.find("self_pair") != std::string::npos);
  CHECK(text.find("token_jaccard") != std::string::npos);
}
