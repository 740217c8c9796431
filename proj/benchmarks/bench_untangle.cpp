#include <benchmark/benchmark.h>

#include <random>

#include "untangle/clustering.hpp"
#include "untangle/dataset.hpp"
#include "untangle/metrics.hpp"
#include "untangle/model.hpp"
#include "untangle/synth.hpp"
#include "untangle/vocabulary.hpp"

using namespace untangle;

namespace {

struct Setup {
  std::vector<Channel> channels;
  Vocabulary vocab;
  std::vector<Example> examples;
  ModelParams model;
};

const Setup& setup() {
  static const Setup s = [] {
    Setup out;
    SynthConfig sc;
    sc.channels = 1;
    out.channels = generate_corpus(sc);
    out.vocab = build_vocab(out.channels, 1);
    out.examples = make_examples(out.channels, out.vocab, WindowConfig{}, true);
    ModelConfig mc;
    mc.encoder.vocab_size = out.vocab.size();
    mc.encoder.width = 32;
    mc.encoder.layers = 1;
    mc.encoder.ff_width = 64;
    mc.lstm_hidden = 16;
    out.model = init_model(mc, 1);
    return out;
  }();
  return s;
}

Clustering random_clustering(std::mt19937_64& rng, std::size_t n, int k) {
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<int> labels(n);
  for (auto& l : labels) l = pick(rng);
  return Clustering::from_labels(labels);
}

}  // namespace

static void BM_ScoreWindow(benchmark::State& state) {
  const auto& s = setup();
  const auto& ex = s.examples.back();
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_batch(s.model, ex.batch, &ex.features));
  }
}
BENCHMARK(BM_ScoreWindow)->Unit(benchmark::kMillisecond);

static void BM_ForwardBackward(benchmark::State& state) {
  const auto& s = setup();
  const auto& ex = s.examples.back();
  ParamSet grads = s.model.tensors.zeros_like();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        forward_backward(s.model, ex.batch, &ex.features, LossConfig{}, &grads));
  }
}
BENCHMARK(BM_ForwardBackward)->Unit(benchmark::kMillisecond);

static void BM_OneToOne(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_clustering(rng, n, static_cast<int>(n / 10));
  const auto b = random_clustering(rng, n, static_cast<int>(n / 10));
  for (auto _ : state) {
    benchmark::DoNotOptimize(one_to_one(a, b));
  }
}
BENCHMARK(BM_OneToOne)->Arg(500)->Arg(5000);

static void BM_BuildClusters(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  ReplyGraph g;
  g.parent.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.parent[i] = i < 50 ? i : i - std::uniform_int_distribution<std::size_t>(0, 50)(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_clusters(g));
  }
}
BENCHMARK(BM_BuildClusters)->Arg(5000)->Arg(70000);
BENCHMARK_MAIN();
