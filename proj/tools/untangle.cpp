// Command-line front end: synth, train, predict, evaluate, ensemble, stats.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "untangle/checkpoint.hpp"
#include "untangle/config.hpp"
#include "untangle/corpus.hpp"
#include "untangle/dataset.hpp"
#include "untangle/ensemble.hpp"
#include "untangle/error.hpp"
#include "untangle/features.hpp"
#include "untangle/inference.hpp"
#include "untangle/metrics.hpp"
#include "untangle/posttrain.hpp"
#include "untangle/stats.hpp"
#include "untangle/synth.hpp"
#include "untangle/trainer.hpp"

namespace fs = std::filesystem;
using namespace untangle;

namespace {

// Keys accepted in a --config file; each mirrors the flag of the same name.
const std::vector<std::string> kConfigKeys = {
    "kind",        "context_range", "future",       "alpha",      "max_seq_len",
    "seed",        "features",      "context",      "epochs",     "learning_rate",
    "batch_size",  "width",         "layers",       "heads",      "ff_width",
    "lstm_hidden", "dropout",       "min_count",    "posttrain_epochs",
    "posttrain_learning_rate",      "clip_norm",    "lr_decay"};

/// Flag value when the flag was given, else config entry, else default.
class Settings {
 public:
  void load(const std::string& path) {
    if (path.empty()) {
      return;
    }
    config_ = KeyValueConfig::load(path);
    const auto unknown = config_.unknown_keys(kConfigKeys);
    if (!unknown.empty()) {
      throw ParseError("unknown key \"" + unknown.front() + "\" in config file " + path);
    }
  }

  template <class T>
  T get(const CLI::Option* flag, const T& flag_value, const std::string& key,
        const T& fallback) const {
    std::optional<T> from_flag;
    if (flag != nullptr && flag->count() > 0) {
      from_flag = flag_value;
    }
    return resolve_setting(from_flag, from_config<T>(key), fallback);
  }

 private:
  template <class T>
  std::optional<T> from_config(const std::string& key) const {
    if constexpr (std::is_same_v<T, std::size_t>) {
      return config_.get_size(key);
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      const auto v = config_.get_size(key);
      return v ? std::optional<T>(static_cast<T>(*v)) : std::nullopt;
    } else if constexpr (std::is_same_v<T, double>) {
      return config_.get_double(key);
    } else if constexpr (std::is_same_v<T, bool>) {
      return config_.get_bool(key);
    } else {
      return config_.get(key);
    }
  }

  KeyValueConfig config_;
};

struct WindowFlags {
  std::size_t context_range = 50;
  std::size_t future = 0;
  std::size_t max_seq_len = 100;
  CLI::Option* context_range_opt = nullptr;
  CLI::Option* future_opt = nullptr;
  CLI::Option* max_seq_len_opt = nullptr;

  void add(CLI::App* app) {
    context_range_opt = app->add_option("--context-range", context_range,
                                        "Candidate window T: the message itself plus T-1 "
                                        "preceding messages (default 50)");
    future_opt = app->add_option("--future", future,
                                 "Extra candidate slots for following messages (default 0)");
    max_seq_len_opt =
        app->add_option("--max-seq-len", max_seq_len, "Token limit per pair (default 100)");
  }

  WindowConfig resolve(const Settings& s, const WindowConfig& base) const {
    WindowConfig w;
    w.context_range = s.get(context_range_opt, context_range, "context_range", base.context_range);
    w.future = s.get(future_opt, future, "future", base.future);
    w.max_seq_len = s.get(max_seq_len_opt, max_seq_len, "max_seq_len", base.max_seq_len);
    w.validate();
    return w;
  }
};

bool parse_on_off(const std::string& text, const std::string& flag) {
  try {
    return parse_switch(text);
  } catch (const ParseError&) {
    throw ParseError(flag + " expects on or off, got \"" + text + "\"");
  }
}

void write_predictions(const fs::path& out_dir, std::span<const Channel> channels,
                       const Ranker& ranker, const Vocabulary& vocab,
                       const WindowConfig& window) {
  fs::create_directories(out_dir);
  for (const auto& channel : channels) {
    const auto prediction = predict_channel(ranker, channel, vocab, window);
    save_annotated_channel(out_dir / channel.name, channel, &prediction.graph.parent);
  }
}

std::unique_ptr<Ranker> make_ranker(const Checkpoint& cp) {
  if (cp.model) {
    return std::make_unique<ModelRanker>(*cp.model);
  }
  return std::make_unique<BaselineRanker>(*cp.baseline);
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  SynthConfig config;
};

int run_synth(const SynthArgs& a) {
  const auto corpus = generate_corpus(a.config);
  fs::create_directories(a.out);
  for (const auto& channel : corpus) {
    save_annotated_channel(fs::path(a.out) / channel.name, channel);
  }
  std::size_t lines = 0;
  for (const auto& c : corpus) {
    lines += c.size();
  }
  std::cout << "wrote " << corpus.size() << " channels (" << lines << " messages) to "
            << a.out << '\n';
  return 0;
}

struct TrainArgs {
  std::string data, dev, model, config, log;
  std::string kind = "dialbert";
  std::string features = "off";
  std::string context = "on";
  std::string lr_decay = "off";
  WindowFlags window;
  double alpha = 0.1, learning_rate = 1e-3, dropout = 0.1, clip_norm = 1.0;
  double posttrain_learning_rate = 1e-3;
  std::uint64_t seed = 1;
  std::size_t epochs = 10, batch_size = 4, width = 64, layers = 2, heads = 4, ff_width = 128,
              lstm_hidden = 32, min_count = 1, posttrain_epochs = 0;
  std::map<std::string, CLI::Option*> opts;
};

int run_train(const TrainArgs& a) {
  Settings s;
  s.load(a.config);
  auto opt = [&](const char* name) { return a.opts.at(name); };

  const auto kind = s.get<std::string>(opt("kind"), a.kind, "kind", "dialbert");
  const auto window = a.window.resolve(s, WindowConfig{});
  const auto seed = s.get(opt("seed"), a.seed, "seed", std::uint64_t{1});

  LoadOptions load;
  load.max_seq_len = window.max_seq_len;
  const auto train_channels = load_channels(a.data, load);
  std::vector<Channel> dev_channels;
  if (!a.dev.empty()) {
    dev_channels = load_channels(a.dev, load);
  }
  const auto min_count = s.get(opt("min-count"), a.min_count, "min_count", std::size_t{1});
  const auto vocab = build_vocab(train_channels, min_count);

  TrainConfig tc;
  tc.alpha = s.get(opt("alpha"), a.alpha, "alpha", tc.alpha);
  tc.learning_rate = s.get(opt("lr"), a.learning_rate, "learning_rate", tc.learning_rate);
  tc.epochs = s.get(opt("epochs"), a.epochs, "epochs", tc.epochs);
  tc.batch_size = s.get(opt("batch-size"), a.batch_size, "batch_size", tc.batch_size);
  tc.clip_norm = s.get(opt("clip-norm"), a.clip_norm, "clip_norm", tc.clip_norm);
  tc.linear_decay = parse_on_off(
      s.get<std::string>(opt("lr-decay"), a.lr_decay, "lr_decay", "off"), "--lr-decay");
  tc.shuffle_seed = seed;
  tc.validate();

  ExampleSetStats stats;
  const auto train = make_examples(train_channels, vocab, window, true, &stats);
  const auto dev = make_examples(dev_channels, vocab, window, false);
  std::cerr << "training on " << stats.targets << " targets (" << stats.skipped_out_of_window
            << " skipped: parent outside window), " << dev.size() << " dev targets, vocab "
            << vocab.size() << '\n';

  const auto log_path = a.log.empty() ? a.model + ".log" : a.log;
  std::ofstream log(log_path);
  if (!log) {
    throw DataError("cannot write training log " + log_path);
  }

  Checkpoint cp;
  cp.vocab = vocab;
  cp.window = window;
  double best_dev = 0.0;
  std::size_t best_epoch = 0;
  if (kind == "dialbert") {
    ModelConfig mc;
    mc.encoder.vocab_size = vocab.size();
    mc.encoder.width = s.get(opt("width"), a.width, "width", mc.encoder.width);
    mc.encoder.layers = s.get(opt("layers"), a.layers, "layers", mc.encoder.layers);
    mc.encoder.heads = s.get(opt("heads"), a.heads, "heads", mc.encoder.heads);
    mc.encoder.ff_width = s.get(opt("ff-width"), a.ff_width, "ff_width", mc.encoder.ff_width);
    mc.encoder.dropout = s.get(opt("dropout"), a.dropout, "dropout", mc.encoder.dropout);
    mc.encoder.max_seq_len = window.max_seq_len;
    mc.lstm_hidden = s.get(opt("lstm-hidden"), a.lstm_hidden, "lstm_hidden", mc.lstm_hidden);
    mc.use_features = parse_on_off(
        s.get<std::string>(opt("features"), a.features, "features", "off"), "--features");
    mc.use_context = parse_on_off(
        s.get<std::string>(opt("context"), a.context, "context", "on"), "--context");
    auto model = init_model(mc, seed);

    PosttrainConfig pc;
    pc.epochs = s.get(opt("posttrain-epochs"), a.posttrain_epochs, "posttrain_epochs",
                      std::size_t{0});
    pc.learning_rate = s.get(opt("posttrain-lr"), a.posttrain_learning_rate,
                             "posttrain_learning_rate", pc.learning_rate);
    pc.seed = seed;
    pc.max_seq_len = window.max_seq_len;
    if (pc.epochs > 0) {
      const auto losses = posttrain(model, train_channels, vocab, pc, &std::cerr);
      std::cerr << "post-training loss after " << losses.size() << " epochs: "
                << losses.back() << '\n';
    }
    auto result = train_model(std::move(model), train, dev, tc, &log);
    best_dev = result.best_dev_accuracy;
    best_epoch = result.best_epoch;
    cp.model = std::move(result.best);
  } else {
    const auto bk = parse_baseline_kind(kind);
    auto init = bk == BaselineKind::kLinear ? init_linear() : init_feedforward(seed);
    auto result = train_baseline(std::move(init), train, dev, tc, &log);
    best_dev = result.best_dev_accuracy;
    best_epoch = result.best_epoch;
    cp.baseline = std::move(result.best);
  }
  save_checkpoint(a.model, cp);
  vocab.save(a.model + ".vocab");
  std::cout << "saved " << kind << " model to " << a.model << " (best epoch " << best_epoch;
  if (!dev.empty()) {
    std::cout << ", dev parent accuracy " << best_dev;
  }
  std::cout << ")\n";
  return 0;
}

struct PredictArgs {
  std::string data, model, out, config;
  WindowFlags window;
};

int run_predict(const PredictArgs& a) {
  Settings s;
  s.load(a.config);
  const auto cp = load_checkpoint(a.model);
  const auto window = a.window.resolve(s, cp.window);
  if (window.max_seq_len != cp.window.max_seq_len && cp.model) {
    throw ParseError("--max-seq-len conflicts with the checkpoint (" +
                     std::to_string(cp.window.max_seq_len) + ")");
  }
  LoadOptions load;
  load.max_seq_len = window.max_seq_len;
  const auto channels = load_channels(a.data, load);
  const auto ranker = make_ranker(cp);
  write_predictions(a.out, channels, *ranker, cp.vocab, window);
  std::cout << "wrote predictions for " << channels.size() << " channels to " << a.out << '\n';
  return 0;
}

struct EvaluateArgs {
  std::string gold, pred, format = "table";
};

int run_evaluate(const EvaluateArgs& a) {
  const auto gold = load_channels(a.gold);
  const auto pred = load_channels(a.pred);
  if (gold.size() != pred.size()) {
    throw DataError("gold has " + std::to_string(gold.size()) + " channels but predictions have " +
                    std::to_string(pred.size()));
  }
  std::vector<Clustering> g, p;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].name != pred[i].name || gold[i].size() != pred[i].size()) {
      throw DataError("prediction file " + pred[i].name + " does not match gold file " +
                      gold[i].name);
    }
    g.push_back(gold[i].gold_clusters);
    p.push_back(pred[i].gold_clusters);
  }
  const auto report = evaluate(p, g);
  if (a.format == "kv") {
    write_report_keyvalue(std::cout, report);
  } else {
    write_report_table(std::cout, report);
  }
  return 0;
}

struct EnsembleArgs {
  std::vector<std::string> models;
  std::string strategy = "prob-avg", data, out, save_model;
  WindowFlags window;
};

int run_ensemble(const EnsembleArgs& a) {
  const auto strategy = parse_strategy(a.strategy);
  std::vector<Checkpoint> cps;
  for (const auto& path : a.models) {
    cps.push_back(load_checkpoint(path));
  }
  for (const auto& cp : cps) {
    if (!(cp.vocab == cps.front().vocab)) {
      throw DataError("ensemble members were trained with different vocabularies");
    }
  }
  Settings s;
  const auto window = a.window.resolve(s, cps.front().window);
  LoadOptions load;
  load.max_seq_len = window.max_seq_len;
  const auto channels = load_channels(a.data, load);

  if (strategy == EnsembleStrategy::kModelAverage) {
    std::vector<ModelParams> models;
    for (const auto& cp : cps) {
      if (!cp.model) {
        throw DataError("model-avg needs full models, not feature baselines");
      }
      models.push_back(*cp.model);
    }
    Checkpoint averaged;
    averaged.model = model_avg(models);
    averaged.vocab = cps.front().vocab;
    averaged.window = cps.front().window;
    if (!a.save_model.empty()) {
      save_checkpoint(a.save_model, averaged);
    }
    const ModelRanker ranker(*averaged.model);
    write_predictions(a.out, channels, ranker, averaged.vocab, window);
  } else {
    std::vector<std::unique_ptr<Ranker>> owned;
    std::vector<const Ranker*> members;
    for (const auto& cp : cps) {
      owned.push_back(make_ranker(cp));
      members.push_back(owned.back().get());
    }
    std::unique_ptr<Ranker> ensemble;
    if (strategy == EnsembleStrategy::kVote) {
      ensemble = std::make_unique<VoteRanker>(members);
    } else {
      ensemble = std::make_unique<ProbAverageRanker>(members);
    }
    write_predictions(a.out, channels, *ensemble, cps.front().vocab, window);
  }
  std::cout << "wrote " << to_string(strategy) << " predictions of " << cps.size()
            << " models to " << a.out << '\n';
  return 0;
}

struct StatsArgs {
  std::vector<std::string> data;
  std::size_t context_range = 50;
  std::size_t max_distance = 100;
};

int run_stats(const StatsArgs& a) {
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const auto channels = load_channels(a.data[i]);
    if (a.data.size() > 1) {
      std::cout << (i == 0 ? "" : "\n") << "[" << a.data[i] << "]\n";
    }
    write_stats(std::cout, corpus_stats(channels, a.context_range, a.max_distance));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conversation disentanglement for interleaved chat logs"};
  app.require_subcommand(0, 1);
  std::string schema_path;
  app.add_option("--dump-feature-schema", schema_path,
                 "Write the pair-feature schema to PATH and exit");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic annotated corpus");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.config.seed, "Random seed");
  synth_cmd->add_option("--channels", synth.config.channels, "Number of channels");
  synth_cmd->add_option("--conversations", synth.config.conversations,
                        "Interleaved conversations per channel");
  synth_cmd->add_option("--messages", synth.config.messages, "Messages per conversation");
  synth_cmd->add_option("--themes", synth.config.themes, "Keyword themes shared by all channels (default 3)");
  synth_cmd->add_option("--join-rate", synth.config.join_rate,
                        "Chance of a system join line before each message");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a model on annotated channels");
  train_cmd->add_option("--data", train.data, "Training channels (directory or file)")->required();
  train_cmd->add_option("--dev", train.dev, "Development channels for model selection");
  train_cmd->add_option("--model", train.model, "Checkpoint to write")->required();
  train_cmd->add_option("--config", train.config, "key=value settings file (flags win)");
  train_cmd->add_option("--log", train.log, "Epoch log path (default MODEL.log)");
  train.window.add(train_cmd);
  auto add = [&](const char* name, auto& field, const char* help) {
    train.opts[name] = train_cmd->add_option(std::string("--") + name, field, help);
  };
  add("kind", train.kind, "dialbert (default), linear or feedforward");
  add("alpha", train.alpha, "Weight of the conversation loss term (default 0.1)");
  add("seed", train.seed, "Initialisation, shuffling and dropout seed (default 1)");
  add("features", train.features, "Add hand-built pair features to the model: on/off (default off)");
  add("context", train.context, "Context aggregator: on/off (default on)");
  add("epochs", train.epochs, "Training epochs (default 10)");
  add("lr", train.learning_rate, "Learning rate (default 1e-3)");
  add("lr-decay", train.lr_decay, "Decay the learning rate linearly to zero: on/off (default off)");
  add("batch-size", train.batch_size, "Targets per update (default 4)");
  add("clip-norm", train.clip_norm, "Global gradient-norm clip (default 1.0)");
  add("width", train.width, "Encoder width (default 64)");
  add("layers", train.layers, "Encoder layers (default 2)");
  add("heads", train.heads, "Attention heads (default 4)");
  add("ff-width", train.ff_width, "Encoder feedforward width (default 128)");
  add("lstm-hidden", train.lstm_hidden, "Aggregator hidden size per direction (default 32)");
  add("dropout", train.dropout, "Dropout rate (default 0.1)");
  add("min-count", train.min_count, "Minimum token count for the vocabulary (default 1)");
  add("posttrain-epochs", train.posttrain_epochs,
      "Masked-token / next-message epochs before training (default 0)");
  add("posttrain-lr", train.posttrain_learning_rate, "Post-training learning rate (default 1e-3)");
  train.opts["context-range"] = train.window.context_range_opt;

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Predict reply links for channels");
  predict_cmd->add_option("--data", predict.data, "Channels to label")->required();
  predict_cmd->add_option("--model", predict.model, "Checkpoint")->required();
  predict_cmd->add_option("--out", predict.out, "Output directory")->required();
  predict_cmd->add_option("--config", predict.config, "key=value settings file (flags win)");
  predict.window.add(predict_cmd);

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predicted channels against gold");
  eval_cmd->add_option("--gold", eval.gold, "Gold channels")->required();
  eval_cmd->add_option("--pred", eval.pred, "Predicted channels (output of predict)")->required();
  eval_cmd->add_option("--format", eval.format, "table or kv")
      ->check(CLI::IsMember({"table", "kv"}));

  EnsembleArgs ens;
  auto* ens_cmd = app.add_subcommand("ensemble", "Combine several trained models");
  ens_cmd->add_option("--models", ens.models, "Checkpoints to combine")
      ->required()
      ->delimiter(',');
  ens_cmd->add_option("--strategy", ens.strategy, "model-avg, prob-avg (default) or vote");
  ens_cmd->add_option("--data", ens.data, "Channels to label")->required();
  ens_cmd->add_option("--out", ens.out, "Output directory")->required();
  ens_cmd->add_option("--save-model", ens.save_model, "Write the averaged model (model-avg)");
  ens.window.add(ens_cmd);

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus and parent-distance statistics");
  stats_cmd->add_option("--data", stats.data, "Channel directories, one section each")
      ->required();
  stats_cmd->add_option("--context-range", stats.context_range,
                        "Window used for the in-range share (default 50)");
  stats_cmd->add_option("--max-distance", stats.max_distance,
                        "Largest histogram bucket (default 100)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!schema_path.empty()) {
      std::ofstream out(schema_path);
      if (!out) {
        throw DataError("cannot write " + schema_path);
      }
      write_feature_schema(out);
      if (app.get_subcommands().empty()) {
        return 0;
      }
    }
    if (*synth_cmd) return run_synth(synth);
    if (*train_cmd) return run_train(train);
    if (*predict_cmd) return run_predict(predict);
    if (*eval_cmd) return run_evaluate(eval);
    if (*ens_cmd) return run_ensemble(ens);
    if (*stats_cmd) return run_stats(stats);
    std::cerr << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
