#include "doctest.h"

#include "dynsync/graph_sequence.hpp"
#include "oracle/dense_oracle.hpp"
#include "support.hpp"

using namespace dynsync;
using testing::complete_edges;
using testing::path_edges;

TEST_CASE("graph sequence canonicalizes and validates edges") {
  GraphSequence g(4, 1, {{{2, 0}, {0, 1}}, {{3, 1}}});
  REQUIRE(g.edge_count(0) == 2);
  CHECK(g.edges(0)[0] == Edge{0, 1});
  CHECK(g.edges(0)[1] == Edge{0, 2});
  CHECK(g.edges(1)[0] == Edge{1, 3});
  CHECK(g.total_edges() == 3);
  CHECK(g.edge_offset(1) == 2);
  CHECK(g.contains(0, {0, 2}));
  CHECK(g.contains(0, {2, 0}));
  CHECK_FALSE(g.contains(1, {0, 2}));

  CHECK_THROWS_AS(GraphSequence(3, 1, {{{1, 1}}, {}}), InvalidArgument);
  CHECK_THROWS_AS(GraphSequence(3, 1, {{{0, 1}, {1, 0}}, {}}), InvalidArgument);
  CHECK_THROWS_AS(GraphSequence(3, 1, {{{0, 3}}, {}}), DimensionError);
  CHECK_THROWS_AS(GraphSequence(1, 1, {{}, {}}), InvalidArgument);
  CHECK_THROWS_AS(GraphSequence(3, 0, {{}}), InvalidArgument);
  CHECK_THROWS_AS(GraphSequence(3, 2, {{}, {}}), DimensionError);
  CHECK_THROWS_AS(g.edges(2), DimensionError);
}

TEST_CASE("incidence apply on small graphs") {
  GraphSequence single(2, 1, {{{0, 1}}, {}});
  const std::vector<double> z{1.0, -1.0};
  CHECK(incidence_apply(single, 0, z) == std::vector<double>{2.0});

  GraphSequence path(3, 1, {{{0, 1}, {1, 2}}, {}});
  const std::vector<double> z3{3.0, 2.0, 0.0};
  CHECK(incidence_apply(path, 0, z3) == std::vector<double>{1.0, 2.0});

  CHECK_THROWS_AS(incidence_apply(path, 0, std::vector<double>{1.0, 2.0}), DimensionError);
  CHECK_THROWS_AS(incidence_apply(path, 3, z3), DimensionError);
  CHECK_THROWS_AS(incidence_adjoint(path, 0, std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("incidence adjoint identity against materialized Q") {
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_index(5));
    const int horizon = 1 + static_cast<int>(rng.uniform_index(3));
    const auto g = testing::random_graph(n, horizon, 0.5, rng);
    const auto z = testing::random_trajectory(n, horizon, rng);
    const oracle::Matrix q = oracle::incidence(g);

    const auto qtz = incidence_apply(g, z);
    const oracle::Vector dense = q.transpose() * oracle::to_vector(z.values());
    CHECK(testing::max_abs_diff(qtz, std::span<const double>(dense.data(), dense.size())) < 1e-12);

    for (int w_rep = 0; w_rep < 20; ++w_rep) {
      const auto w = testing::random_vector(g.total_edges(), rng);
      const auto qw = incidence_adjoint(g, w);
      const double lhs = testing::dot(qtz, w);
      const double rhs = testing::dot(z.values(), qw.values());
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
      const oracle::Vector dense_qw = q * oracle::to_vector(w);
      CHECK(testing::max_abs_diff(qw.values(), std::span<const double>(dense_qw.data(), dense_qw.size())) < 1e-12);
    }
  }
}

TEST_CASE("laplacian apply") {
  GraphSequence k3(3, 1, {complete_edges(3), {}});
  CHECK(laplacian_apply(k3, 0, std::vector<double>{1.0, 0.0, -1.0}) == std::vector<double>{3.0, 0.0, -3.0});

  GraphSequence path(3, 1, {path_edges(3), {}});
  CHECK(laplacian_apply(path, 0, std::vector<double>{1.0, 0.0, 0.0}) == std::vector<double>{1.0, -1.0, 0.0});

  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_index(6));
    const auto g = testing::random_graph(n, 2, 0.4, rng);
    for (int k = 0; k < g.steps(); ++k) {
      const std::vector<double> ones(n, 1.0);
      for (double v : laplacian_apply(g, k, ones)) CHECK(v == 0.0);
      const auto z = testing::random_vector(n, rng);
      CHECK(testing::dot(z, laplacian_apply(g, k, z)) >= -1e-12);
    }
  }
}

TEST_CASE("connectivity of steps and union") {
  CHECK_FALSE(is_connected(GraphSequence(3, 1, {{{0, 1}}, {}}), 0));
  CHECK(is_connected(GraphSequence(3, 1, {{{0, 1}, {1, 2}}, {}}), 0));

  GraphSequence split(3, 1, {{{0, 1}}, {{1, 2}}});
  CHECK_FALSE(is_connected(split, 0));
  CHECK_FALSE(is_connected(split, 1));
  CHECK(union_is_connected(split));

  GraphSequence apart(4, 1, {{{0, 1}}, {{2, 3}}});
  CHECK_FALSE(union_is_connected(apart));
}

TEST_CASE("smoothness operator") {
  SUBCASE("constant trajectory is annihilated") {
    StrengthTrajectory z(3, 3, {1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3});
    for (double v : smoothness_apply(z)) CHECK(std::abs(v) < 1e-15);
    CHECK(smoothness_energy(z) == doctest::Approx(0.0));
  }

  SUBCASE("n=3, T=1 example") {
    StrengthTrajectory z(3, 1, {1, -1, 0, 0, 0, 0});
    CHECK(testing::norm_sq(smoothness_apply(z)) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(smoothness_energy(z) == doctest::Approx(6.0).epsilon(1e-14));
  }

  SUBCASE("equals explicit E = M^T kron C^T and the adjoint matches") {
    Rng rng(17);
    for (int n = 2; n <= 6; ++n) {
      for (int horizon = 1; horizon <= 5; ++horizon) {
        const auto z = testing::random_trajectory(n, horizon, rng);
        const oracle::Matrix e = oracle::smoothness(n, horizon);
        const double dense = (e * oracle::to_vector(z.values())).squaredNorm();
        const auto ez = smoothness_apply(z);
        CHECK(testing::norm_sq(ez) == doctest::Approx(dense).epsilon(1e-10));
        CHECK(smoothness_energy(z) == doctest::Approx(dense).epsilon(1e-10));

        const auto w = testing::random_vector(ez.size(), rng);
        const auto etw = smoothness_adjoint(n, horizon, w);
        const double lhs = testing::dot(ez, w);
        const double rhs = testing::dot(z.values(), etw.values());
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
      }
    }
  }

  SUBCASE("energy is invariant to per-step shifts") {
    Rng rng(3);
    auto z = testing::random_trajectory(5, 4, rng);
    const double before = smoothness_energy(z);
    for (int k = 0; k < z.steps(); ++k) {
      const double c = rng.normal() * 10.0;
      for (double& v : z.block(k)) v += c;
    }
    CHECK(smoothness_energy(z) == doctest::Approx(before).epsilon(1e-10));
  }
}

TEST_CASE("trajectory centering") {
  StrengthTrajectory z(2, 1, {3.0, 1.0, -1.0, 5.0});
  CHECK_FALSE(z.is_block_centered());
  z.center_blocks();
  CHECK(z.is_block_centered());
  CHECK(z(0, 0) == 1.0);
  CHECK(z(1, 1) == 3.0);
  CHECK_THROWS_AS(StrengthTrajectory(2, 1, {1.0, 2.0}), DimensionError);
}

TEST_CASE("observation set stacking and triples") {
  auto obs = ObservationSet::from_triples(3, 1, {{1, 2, 0, 0.5}, {0, 0, 1, 2.0}, {0, 1, 2, -1.0}});
  const auto& g = obs.graph();
  CHECK(g.edges(1)[0] == Edge{0, 2});
  CHECK(obs.values(1)[0] == -0.5);
  CHECK(obs.values(0).size() == 2);
  const auto triples = obs.triples();
  REQUIRE(triples.size() == 3);
  CHECK(triples[0].step == 0);
  CHECK(triples[0].i == 0);
  CHECK(triples[0].j == 1);
  CHECK(triples[0].y == 2.0);
  CHECK(triples[2].step == 1);

  CHECK_THROWS_AS(ObservationSet(g, std::vector<double>{1.0}), DimensionError);
  CHECK_THROWS_AS(ObservationSet::from_triples(3, 1, {{0, 0, 1, 1.0}, {0, 1, 0, 1.0}}), InvalidArgument);
}
