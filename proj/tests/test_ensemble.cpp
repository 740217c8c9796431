#include <doctest.h>

#include <random>

#include "toy.hpp"
#include "untangle/ensemble.hpp"
#include "untangle/error.hpp"
#include "untangle/model.hpp"

using namespace untangle;

TEST_CASE("strategy names round-trip") {
  for (const auto s : {EnsembleStrategy::kModelAverage, EnsembleStrategy::kProbabilityAverage,
                       EnsembleStrategy::kVote}) {
    CHECK(parse_strategy(to_string(s)) == s);
  }
  CHECK(parse_strategy("prob-avg") == EnsembleStrategy::kProbabilityAverage);
  CHECK_THROWS_AS(parse_strategy("median"), ParseError);
}

TEST_CASE("model averaging is the element-wise mean") {
  const auto cfg = toy::tiny_config(30);
  const std::vector<ModelParams> models = {init_model(cfg, 1), init_model(cfg, 2),
                                           init_model(cfg, 3)};
  const auto avg = model_avg(models);
  for (std::size_t t = 0; t < avg.tensors.size(); ++t) {
    const Matrix want = (models[0].tensors[t] + models[1].tensors[t] + models[2].tensors[t]) / 3.0;
    CHECK((avg.tensors[t] - want).cwiseAbs().maxCoeff() <= 1e-15);
  }
  CHECK(model_avg({&models[1], 1}).tensors == models[1].tensors);
  const std::vector<ModelParams> same = {models[0], models[0]};
  CHECK((model_avg(same).tensors == models[0].tensors));
}

TEST_CASE("model averaging rejects mismatched inputs") {
  const auto a = init_model(toy::tiny_config(30), 1);
  const auto b = init_model(toy::tiny_config(31), 1);
  const std::vector<ModelParams> mixed = {a, b};
  CHECK_THROWS_AS(model_avg(mixed), ShapeError);
  CHECK_THROWS_AS(model_avg(std::span<const ModelParams>{}), ShapeError);
}

TEST_CASE("probability averaging") {
  const std::vector<Scores> s = {Scores{{0.5, 0.5, 0.0}}, Scores{{0.1, 0.6, 0.3}}};
  const auto avg = prob_avg(s);
  CHECK(avg.probs[0] == doctest::Approx(0.3));
  CHECK(avg.probs[1] == doctest::Approx(0.55));
  CHECK(avg.probs[2] == doctest::Approx(0.15));
  const std::vector<Scores> ragged = {Scores{{1.0}}, Scores{{0.5, 0.5}}};
  CHECK_THROWS_AS(prob_avg(ragged), ShapeError);
}

TEST_CASE("voting and its tie-breaks") {
  const std::vector<std::size_t> order = {1, 2, 0};
  const std::vector<Scores> s3 = {Scores{{0.1, 0.8, 0.1}}, Scores{{0.2, 0.3, 0.5}},
                                  Scores{{0.1, 0.6, 0.3}}};
  const std::vector<std::size_t> majority = {1, 2, 1};
  CHECK(vote(majority, s3, order) == 1);
  // One vote each for slots 0 and 2: slot 2 has the larger mean probability.
  const std::vector<Scores> s2 = {Scores{{0.6, 0.0, 0.4}}, Scores{{0.2, 0.0, 0.8}}};
  const std::vector<std::size_t> split = {0, 2};
  CHECK(vote(split, s2, order) == 2);
  // Equal votes and equal means: the more recent slot in the order wins.
  const std::vector<Scores> even = {Scores{{0.5, 0.5, 0.0}}, Scores{{0.5, 0.5, 0.0}}};
  const std::vector<std::size_t> tie = {0, 1};
  CHECK(vote(tie, even, order) == 1);
}

TEST_CASE("one-member ensembles reproduce the member") {
  const auto f = toy::small_fixture();
  const auto m = init_model(toy::tiny_config(f.vocab.size()), 4);
  const ModelRanker single(m);
  const VoteRanker voter({&single});
  const ProbAverageRanker averager({&single});
  for (const auto& ex : f.examples) {
    const auto want = single.choose(ex.batch, ex.features);
    CHECK(voter.choose(ex.batch, ex.features) == want);
    CHECK(averager.choose(ex.batch, ex.features) == want);
    CHECK(averager.score(ex.batch, ex.features).probs ==
          single.score(ex.batch, ex.features).probs);
  }
}

TEST_CASE("ensembles of differing members stay normalised") {
  const auto f = toy::small_fixture();
  const auto a = init_model(toy::tiny_config(f.vocab.size()), 4);
  const auto b = init_model(toy::tiny_config(f.vocab.size()), 5);
  const ModelRanker ra(a), rb(b);
  const ProbAverageRanker avg({&ra, &rb});
  const VoteRanker voter({&ra, &rb});
  for (const auto& ex : f.examples) {
    const auto s = avg.score(ex.batch, ex.features);
    double total = 0.0;
    for (const auto p : s.probs) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    const auto choice = voter.choose(ex.batch, ex.features);
    CHECK(ex.batch.valid_mask[choice]);
  }
  CHECK_THROWS_AS(VoteRanker({}), ShapeError);
}
