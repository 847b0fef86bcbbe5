#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "arbiter/error.hpp"
#include "arbiter/graph_network.hpp"
#include "gn_check.hpp"
#include "test_support.hpp"

using namespace arbiter;
using arbiter::testing::random_sample;

namespace {

GnDims small_dims(std::size_t hidden = 16) { return GnDims{6, 3, 2, hidden}; }

}  // namespace

TEST_CASE("initialisation") {
  const auto p = GNParameters::initialize(GnDims{768, 8, 2, 128}, 1);
  CHECK(p.edge_update.input_dim() == 8 + 768 * 2 + 2);
  CHECK(p.node_update.input_dim() == 128 + 768 + 2);
  CHECK(p.global_update.input_dim() == 128 + 128 + 2);
  CHECK(p.global_update.output_dim() == 2);
  CHECK(p.edge_update.layers.size() == 2);
  CHECK(p.global_update.layers.size() == 3);
  const double limit = std::sqrt(6.0 / static_cast<double>(p.edge_update.input_dim()));
  CHECK(p.edge_update.layers[0].weight.cwiseAbs().maxCoeff() <= limit);
  CHECK(p.edge_update.layers[0].bias.isZero());
  CHECK(p == GNParameters::initialize(GnDims{768, 8, 2, 128}, 1));
  CHECK_FALSE(p == GNParameters::initialize(GnDims{768, 8, 2, 128}, 2));
  std::size_t count = 0;
  p.visit([&](const std::string&, std::size_t r, std::size_t c, std::span<const double> d) {
    CHECK(d.size() == r * c);
    count += d.size();
  });
  CHECK(count == p.parameter_count());
}

TEST_CASE("forward: probabilities, permutation, empty edges") {
  std::mt19937_64 rng(3);
  const auto p = GNParameters::initialize(small_dims(), 5);
  for (int i = 0; i < 50; ++i) {
    const auto s = random_sample(rng, 1 + rng() % 4, rng() % 4, 6, 3, 0);
    const auto probs = gn_forward(p, s);
    CHECK(std::abs(probs[0] + probs[1] - 1.0) < 1e-9);
    CHECK(probs[0] > 0.0);
    CHECK(probs[1] > 0.0);
    CHECK(arbiter::testing::max_abs_diff(probs, gn_forward(p, arbiter::testing::permuted(s, rng))) < 1e-9);
  }
  auto lone = random_sample(rng, 3, 0, 6, 3, 1);
  CHECK(lone.edges.empty());
  CHECK_NOTHROW(gn_forward(p, lone));
  CHECK_NOTHROW(gn_gradient(p, lone, 1));
}

TEST_CASE("forward: errors") {
  std::mt19937_64 rng(3);
  const auto p = GNParameters::initialize(small_dims(), 5);
  auto s = random_sample(rng, 2, 2, 6, 3, 0);
  auto bad = s;
  bad.nodes[1].features.pop_back();
  CHECK_THROWS_AS(gn_forward(p, bad), DimensionError);
  bad = s;
  bad.edges[0].features.push_back(0);
  CHECK_THROWS_AS(gn_forward(p, bad), DimensionError);
  bad = s;
  bad.nodes.clear();
  bad.edges.clear();
  CHECK_THROWS_AS(gn_forward(p, bad), DimensionError);
  bad = s;
  bad.nodes[0].features[0] = 1e308;
  bad.nodes[1].features[0] = 1e308;
  CHECK_THROWS_AS(gn_forward(p, bad), NumericError);
}

TEST_CASE("loss values") {
  CHECK(gn_loss({1.0, 0.0}, 0) == doctest::Approx(0.0));
  CHECK(gn_loss({0.5, 0.5}, 1) == doctest::Approx(0.693147).epsilon(1e-5));
  CHECK(gn_loss({0.9, 0.1}, 1) == doctest::Approx(2.302585).epsilon(1e-5));
  CHECK(gn_loss({1.0, 0.0}, 1) == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("gradient matches finite differences") {
  std::mt19937_64 rng(19);
  for (int draw = 0; draw < 8; ++draw) {
    const auto p = GNParameters::initialize(small_dims(12), rng());
    const auto s = random_sample(rng, 1 + rng() % 3, rng() % 3, 6, 3, static_cast<int>(rng() & 1));
    const auto r = arbiter::testing::check_gradient(p, s, rng, 40);
    INFO(r.worst);
    CHECK(r.max_rel_error < 1e-4);
  }
}

TEST_CASE("loss_and_gradient agrees with the separate calls") {
  std::mt19937_64 rng(8);
  const auto p = GNParameters::initialize(small_dims(), 2);
  const auto s = random_sample(rng, 2, 1, 6, 3, 1);
  const auto r = gn_loss_and_gradient(p, s, 1);
  CHECK(r.loss == gn_loss(gn_forward(p, s), 1));
  CHECK(r.probs == gn_forward(p, s));
  CHECK(r.gradient == gn_gradient(p, s, 1));
}

TEST_CASE("batch gradient is a sum") {
  std::mt19937_64 rng(23);
  const auto p = GNParameters::initialize(small_dims(), 4);
  const auto a = random_sample(rng, 2, 2, 6, 3, 0);
  const auto b = random_sample(rng, 1, 2, 6, 3, 1);
  const LearningSample* once[] = {&a, &b};
  const LearningSample* twice[] = {&a, &a, &b};
  auto expected = batch_gradient(p, once);
  expected.add_scaled(gn_gradient(p, a, 0), 1.0);
  const auto got = batch_gradient(p, twice);
  double worst = 0;
  std::vector<double> flat;
  expected.visit([&](const std::string&, std::size_t, std::size_t, std::span<const double> d) {
    flat.insert(flat.end(), d.begin(), d.end());
  });
  std::size_t k = 0;
  got.visit([&](const std::string&, std::size_t, std::size_t, std::span<const double> d) {
    for (double x : d) worst = std::max(worst, std::abs(x - flat[k++]));
  });
  CHECK(worst < 1e-12);
}

TEST_CASE("training: lr 0, determinism, config validation") {
  std::mt19937_64 rng(5);
  std::vector<LearningSample> data;
  for (int i = 0; i < 6; ++i) data.push_back(random_sample(rng, 2, 1, 6, 3, i % 2));
  const auto init = GNParameters::initialize(small_dims(), 7);

  const auto frozen = train(init, data, TrainConfig{0.0, 5, 2, 1});
  CHECK(frozen.params == init);
  CHECK(frozen.loss_history.size() == 5);

  const TrainConfig cfg{0.05, 10, 3, 42};
  const auto r1 = train(init, data, cfg);
  const auto r2 = train(init, data, cfg);
  CHECK(r1.params == r2.params);
  CHECK(r1.loss_history == r2.loss_history);
  CHECK_FALSE(r1.params == init);
  const auto r3 = train(init, data, TrainConfig{0.05, 10, 3, 43});
  CHECK_FALSE(r3.params == r1.params);

  std::size_t seen = 0;
  train(init, data, cfg, [&](std::size_t, const GNParameters&, double) { return ++seen < 3; });
  CHECK(seen == 3);

  CHECK_THROWS_AS(validate_train_config({-1.0, 1, 1, 0}), ValidationError);
  CHECK_THROWS_AS(validate_train_config({0.1, 0, 1, 0}), ValidationError);
  CHECK_THROWS_AS(validate_train_config({0.1, 1, 0, 0}), ValidationError);
  CHECK_THROWS_AS(train(init, data, TrainConfig{1e300, 3, 1, 0}), NumericError);
}

TEST_CASE("overfitting one sample drives the gradient to zero") {
  std::mt19937_64 rng(12);
  const auto s = random_sample(rng, 2, 2, 6, 3, 1);
  const std::vector<LearningSample> one{s};
  const auto fit = train(GNParameters::initialize(small_dims(8), 3), one, TrainConfig{1.0, 500000, 1, 0},
                         [&](std::size_t, const GNParameters& p, double) {
                           return arbiter::testing::gradient_norm(gn_gradient(p, s, 1)) >= 1e-7;
                         });
  const double norm = arbiter::testing::gradient_norm(gn_gradient(fit.params, s, 1));
  INFO("epochs " << fit.loss_history.size());
  INFO("loss " << fit.loss_history.back());
  CHECK(norm < 1e-6);
}

TEST_CASE("untrained loss is close to ln 2 on balanced data") {
  std::mt19937_64 rng(99);
  std::vector<LearningSample> data;
  for (int i = 0; i < 40; ++i) data.push_back(random_sample(rng, 1 + i % 3, 1 + i % 2, 32, 8, i % 2));
  double total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = GNParameters::initialize(GnDims{32, 8, 2, 128}, seed);
    double loss = 0;
    for (const auto& s : data) loss += gn_loss(gn_forward(p, s), s.label);
    total += loss / static_cast<double>(data.size());
  }
  const double mean = total / 10.0;
  MESSAGE("mean initial loss " << mean);
  INFO("mean initial loss " << mean);
  CHECK(std::abs(mean - std::log(2.0)) < 0.1 * std::log(2.0));
}

TEST_CASE("debate aggregation") {
  const std::vector<ClassProbs> ffa{{0.8, 0.2}, {0.6, 0.4}, {0.3, 0.7}};
  const auto p1 = aggregate_predictions(ffa);
  CHECK(p1.cls == 0);
  CHECK(p1.confidence == doctest::Approx((0.8 + 0.6 + 0.3) / 3));
  // Tie on votes: mean F = 0.7 beats mean A.
  const std::vector<ClassProbs> tie{{0.9, 0.1}, {0.5 - 1e-9, 0.5 + 1e-9}};
  CHECK(aggregate_predictions(tie).cls == 0);
  const std::vector<ClassProbs> tie_a{{0.51, 0.49}, {0.1, 0.9}};
  CHECK(aggregate_predictions(tie_a).cls == 1);
  const std::vector<ClassProbs> exact_tie{{0.6, 0.4}, {0.4, 0.6}};
  CHECK(aggregate_predictions(exact_tie).cls == 0);
  const std::vector<ClassProbs> single{{0.2, 0.8}};
  CHECK(aggregate_predictions(single).cls == 1);
  CHECK_THROWS_AS(aggregate_predictions({}), ValidationError);
}

TEST_CASE("checkpoint round trip") {
  auto p = GNParameters::initialize(small_dims(), 77);
  std::mt19937_64 rng(1);
  const auto path = std::filesystem::temp_directory_path() / "arbiter_ckpt.json";
  save_checkpoint(p, path);
  const auto back = load_checkpoint(path);
  CHECK(back == p);
  CHECK(back.rng_seed == 77);
  const auto s = random_sample(rng, 2, 2, 6, 3, 0);
  CHECK(gn_forward(back, s) == gn_forward(p, s));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(checkpoint_from_json("{\"format\":\"nope\"}"), ParseError);
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);
}
