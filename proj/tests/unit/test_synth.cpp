#include "doctest.h"

#include <cmath>

#include "dynsync/synth.hpp"
#include "support.hpp"

using namespace dynsync;

namespace {

SynthConfig small_config(std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n = 3;
  cfg.horizon = 4;
  cfg.smoothness = 1.0;
  cfg.noise_sigma = 0.5;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("rng streams") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));

  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng rng(9);
  double sum = 0.0, sq = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / draws) < 0.01);
  CHECK(std::abs(sq / draws - 1.0) < 0.02);

  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(rng.uniform_index(7) < 7);
  }
  int total = 0;
  for (int i = 0; i < 2000; ++i) total += rng.binomial(10, 0.3);
  CHECK(std::abs(total / 2000.0 - 3.0) < 0.15);
  CHECK(rng.binomial(5, 0.0) == 0);
  CHECK(rng.binomial(5, 1.0) == 5);
}

TEST_CASE("ground truth respects the smoothness budget and is centered") {
  Rng pick(31);
  for (int rep = 0; rep < 200; ++rep) {
    SynthConfig cfg;
    cfg.n = 2 + static_cast<int>(pick.uniform_index(20));
    cfg.horizon = 1 + static_cast<int>(pick.uniform_index(60));
    cfg.smoothness = std::exp(pick.uniform(-6.0, 6.0));
    cfg.seed = pick.next_u64();
    const auto z = generate_ground_truth(cfg);
    CHECK(smoothness_energy(z) <= cfg.smoothness);
    double norm = 0.0;
    for (int k = 0; k < z.steps(); ++k) {
      double sum = 0.0;
      for (double v : z.block(k)) {
        sum += v;
        norm += v * v;
      }
      CHECK(std::abs(sum) < 1e-12 * cfg.n);
    }
    CHECK(norm <= 1.0 + 1e-12);
  }
}

TEST_CASE("huge smoothness budget keeps the centered normalized draw") {
  SynthConfig cfg = small_config(3);
  cfg.smoothness = 1e12;
  const auto z = generate_ground_truth(cfg);

  Rng rng = Rng::derive(cfg.seed, {stream::kTruth});
  StrengthTrajectory raw(cfg.n, cfg.horizon);
  double norm_sq = 0.0;
  for (double& v : raw.values()) {
    v = rng.normal();
    norm_sq += v * v;
  }
  for (double& v : raw.values()) v /= std::sqrt(norm_sq);
  raw.center_blocks();
  CHECK(testing::max_abs_diff(z.values(), raw.values()) < 1e-12);
}

TEST_CASE("generation is deterministic") {
  const auto cfg = small_config(42);
  const auto a = generate_instance(cfg);
  const auto b = generate_instance(cfg);
  CHECK(a.truth == b.truth);
  CHECK(a.observations == b.observations);

  auto other = cfg;
  other.seed = 43;
  CHECK_FALSE(generate_instance(other).truth == a.truth);
}

TEST_CASE("Erdos-Renyi sequences") {
  SUBCASE("p = 1 gives complete graphs") {
    SynthConfig cfg = small_config(1);
    cfg.n = 6;
    cfg.edge_probability = EdgeProbability::constant(1.0);
    const auto g = generate_er_sequence(cfg);
    for (int k = 0; k < g.steps(); ++k) CHECK(g.edge_count(k) == 15);
  }

  SUBCASE("p = 0 leaves only repair edges") {
    SynthConfig cfg = small_config(2);
    cfg.n = 8;
    cfg.horizon = 5;
    cfg.edge_probability = EdgeProbability::constant(0.0);
    GraphGenerationStats stats;
    const auto g = generate_er_sequence(cfg, &stats);
    CHECK(union_is_connected(g));
    CHECK(g.total_edges() == 7);
    CHECK(stats.repair_edges == 7);
    CHECK(stats.resample_attempts == 100);
    CHECK_FALSE(stats.all_steps_connected);
  }

  SUBCASE("sparse regime keeps the union connected") {
    SynthConfig cfg;
    cfg.n = 100;
    cfg.horizon = 20;
    cfg.edge_probability = EdgeProbability::uniform_range(1.0 / 100, std::log(100.0) / 100);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      cfg.seed = seed;
      CHECK(union_is_connected(generate_er_sequence(cfg)));
    }
  }

  SUBCASE("per-step connectivity mode") {
    SynthConfig cfg;
    cfg.n = 20;
    cfg.horizon = 10;
    cfg.edge_probability = EdgeProbability::constant(std::log(20.0) / 20);
    cfg.require_step_connectivity = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      cfg.seed = seed;
      GraphGenerationStats stats;
      const auto g = generate_er_sequence(cfg, &stats);
      CHECK(stats.all_steps_connected);
      for (int k = 0; k < g.steps(); ++k) CHECK(is_connected(g, k));
    }
  }

  SUBCASE("schedule must cover every step") {
    SynthConfig cfg = small_config(1);
    cfg.edge_probability = EdgeProbability::per_step({0.5, 0.5});
    CHECK_THROWS_AS(cfg.validate(), DimensionError);
    cfg.edge_probability = EdgeProbability::constant(1.5);
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  }
}

TEST_CASE("Gaussian observations") {
  SynthConfig cfg = small_config(5);
  const auto truth = generate_ground_truth(cfg);
  const auto g = generate_er_sequence(cfg);

  const auto clean = generate_observations(truth, g, 0.0, 1);
  const auto triples = clean.triples();
  for (const auto& t : triples) CHECK(t.y == truth(t.step, t.i) - truth(t.step, t.j));

  // moments of the noise over many edges
  SynthConfig big;
  big.n = 60;
  big.horizon = 60;
  big.edge_probability = EdgeProbability::constant(1.0);
  big.seed = 8;
  const auto gt = generate_ground_truth(big);
  const auto gg = generate_er_sequence(big);
  const auto noisy = generate_observations(gt, gg, 1.0, 99);
  const auto exact = incidence_apply(gg, gt);
  REQUIRE(exact.size() >= 100000);
  double sum = 0.0, sq = 0.0;
  for (std::size_t e = 0; e < exact.size(); ++e) {
    const double d = noisy.values()[e] - exact[e];
    sum += d;
    sq += d * d;
  }
  const double mean = sum / exact.size();
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(sq / exact.size() - mean * mean - 1.0) < 0.05);

  // relabeling items flips the noiseless part
  StrengthTrajectory swapped = truth;
  for (int k = 0; k < truth.steps(); ++k) {
    swapped(k, 0) = truth(k, 1);
    swapped(k, 1) = truth(k, 0);
  }
  GraphSequence pair(cfg.n, cfg.horizon, std::vector<std::vector<Edge>>(cfg.horizon + 1, {{0, 1}}));
  const auto a = generate_observations(truth, pair, 0.0, 1);
  const auto b = generate_observations(swapped, pair, 0.0, 1);
  for (std::size_t e = 0; e < a.values().size(); ++e) CHECK(a.values()[e] == -b.values()[e]);

  CHECK_THROWS_AS(generate_observations(truth, GraphSequence(4, 4, std::vector<std::vector<Edge>>(5)), 1.0, 1),
                  DimensionError);
}

TEST_CASE("BTL observations") {
  CHECK(btl_log_odds(8, 8) == doctest::Approx(std::log(8.5 / 0.5)));
  CHECK(btl_log_odds(0, 1) == doctest::Approx(std::log(1.0 / 3.0)));

  SUBCASE("equal strengths concentrate near zero") {
    GraphSequence g(2, 1, {{{0, 1}}, {{0, 1}}});
    StrengthTrajectory w(2, 1, {1.0, 1.0, 1.0, 1.0});
    int close = 0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
      const auto obs = generate_btl_observations(w, g, 100000, s);
      for (double y : obs.values()) close += std::abs(y) < 0.05 ? 1 : 0;
    }
    CHECK(close >= 0.99 * 2 * seeds);
  }

  SUBCASE("bias shrinks with L") {
    // Exact expectation from the binomial pmf; the sampler is checked against it.
    GraphSequence g(2, 1, {{{0, 1}}, {{0, 1}}});
    StrengthTrajectory w(2, 1, {2.0, 1.0, 2.0, 1.0});
    const double p = 2.0 / 3.0;
    const double target = std::log(2.0);
    double prev = std::numeric_limits<double>::infinity();
    for (int trials : {8, 64, 512}) {
      double mean = 0.0, second = 0.0;
      for (int x = 0; x <= trials; ++x) {
        const double logpmf = std::lgamma(trials + 1.0) - std::lgamma(x + 1.0) - std::lgamma(trials - x + 1.0) +
                              x * std::log(p) + (trials - x) * std::log1p(-p);
        const double y = btl_log_odds(x, trials);
        mean += std::exp(logpmf) * y;
        second += std::exp(logpmf) * y * y;
      }
      const double bias = std::abs(mean - target);
      CHECK(bias < prev);
      CHECK(bias <= 1.0 / trials);
      prev = bias;

      double sum = 0.0;
      const int seeds = 2000;
      for (int s = 0; s < seeds; ++s) {
        const auto obs = generate_btl_observations(w, g, trials, 7 + s);
        sum += obs.values()[0] + obs.values()[1];
      }
      const double sd = std::sqrt((second - mean * mean) / (2.0 * seeds));
      CHECK(std::abs(sum / (2.0 * seeds) - mean) < 4.0 * sd);
    }
  }

  SUBCASE("instance uses log weights as truth") {
    SynthConfig cfg = small_config(11);
    cfg.model = ObservationModel::Btl;
    cfg.btl_trials = 64;
    const auto inst = generate_instance(cfg);
    CHECK(inst.truth.is_block_centered());
    CHECK(inst.observations.values().size() == inst.graph.total_edges());
    for (double y : inst.observations.values()) CHECK(std::abs(y) <= std::log(64.5 / 0.5) + 1e-12);
  }
}
