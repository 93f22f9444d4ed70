#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "locpriv/adversary.h"
#include "locpriv/markov.h"
#include "locpriv/random.h"
#include "oracles.h"

namespace locpriv {
namespace {

ObservationMatrix single_column(std::vector<StateId> states) {
  const std::size_t m = states.size();
  return ObservationMatrix(m, 1, std::move(states));
}

std::vector<std::uint32_t> as_vector(std::span<const std::uint32_t> s) {
  return {s.begin(), s.end()};
}

LikelihoodMatrix random_matrix(std::size_t n, Rng& rng, double spread) {
  LikelihoodMatrix l(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t j = 0; j < n; ++j) l(u, j) = -spread * rng.uniform();
  return l;
}

TEST(CountStatsTest, TwoStateColumn) {
  const auto s = count_stats(single_column({1, 0, 1, 1}), 2);
  EXPECT_EQ(as_vector(s.column(0)), (std::vector<std::uint32_t>{1, 3}));
}

TEST(CountStatsTest, WorkedExamplePath) {
  const auto s = count_stats(single_column({0, 1, 2, 3}), 5);
  EXPECT_EQ(as_vector(s.column(0)), (std::vector<std::uint32_t>{1, 1, 1, 1, 0}));
}

TEST(TransitionStatsTest, WorkedExamplePath) {
  const auto s = transition_stats(single_column({0, 1, 2, 3}), 5);
  std::vector<std::uint32_t> expected(25, 0);
  expected[0 * 5 + 1] = expected[1 * 5 + 2] = expected[2 * 5 + 3] = 1;
  EXPECT_EQ(as_vector(s.column(0)), expected);
}

TEST(TransitionStatsTest, ConstantColumn) {
  const auto s = transition_stats(single_column({2, 2, 2, 2, 2}), 3);
  EXPECT_EQ(s.column(0)[2 * 3 + 2], 4u);
}

TEST(LogLikelihoodTest, Multinomial) {
  const std::vector<std::uint32_t> c = {1, 1};
  EXPECT_NEAR(log_likelihood_iid(IidProfile({0.5, 0.5}), c), -1.386294, 1e-6);
  const std::vector<std::uint32_t> all = {0, 0, 7};
  const IidProfile p({0.2, 0.3, 0.5});
  EXPECT_DOUBLE_EQ(log_likelihood_iid(p, all), 7 * std::log(0.5));
}

TEST(LogLikelihoodTest, SwapRatioOfTwoUsers) {
  const auto pi = IidProfile::two_state(0.5);
  const auto pj = IidProfile::two_state(0.6);
  const std::vector<std::uint32_t> a = {5, 5};  // five in state 1, m = 10
  const std::vector<std::uint32_t> b = {7, 3};
  const double log_delta = log_likelihood_iid(pi, a) + log_likelihood_iid(pj, b) -
                           log_likelihood_iid(pi, b) - log_likelihood_iid(pj, a);
  EXPECT_NEAR(std::exp(log_delta), 4.0 / 9.0, 1e-12);
}

TEST(LogLikelihoodTest, MarkovPathProbability) {
  const DependencyMap map(MobilityGraph::three_state_example());
  const auto t = map.expand(FreeParamVector{{0.2, 0.3, 0.4}});
  const auto path = transition_stats(single_column({0, 1, 2}), 3);
  EXPECT_NEAR(log_likelihood_markov(t, path.column(0)), std::log(0.3), 1e-15);
  const std::vector<std::uint32_t> zero(9, 0);
  EXPECT_EQ(log_likelihood_markov(t, zero), 0.0);
  const auto off = transition_stats(single_column({1, 0}), 3);
  EXPECT_EQ(log_likelihood_markov(t, off.column(0)), kImpossible);
}

TEST(MapAssignmentTest, SingleUser) {
  EXPECT_EQ(map_assignment(LikelihoodMatrix(1)), Permutation::identity(1));
}

TEST(MapAssignmentTest, DiagonalDominant) {
  LikelihoodMatrix l(5);
  for (std::size_t u = 0; u < 5; ++u)
    for (std::size_t j = 0; j < 5; ++j) l(u, j) = u == j ? 0.0 : -10.0;
  EXPECT_EQ(map_assignment(l), Permutation::identity(5));
}

TEST(MapAssignmentTest, TiesResolveToLexicographicallySmallest) {
  LikelihoodMatrix l(3);  // all zeros: every permutation is optimal
  EXPECT_EQ(map_assignment(l), Permutation::identity(3));
  LikelihoodMatrix m(3, {0, 0, -1, 0, 0, -1, -1, -1, 0});
  EXPECT_EQ(map_assignment(m), Permutation::identity(3));
}

TEST(MapAssignmentTest, AvoidsImpossibleCells) {
  LikelihoodMatrix l(2, {kImpossible, -5.0, -1.0, kImpossible});
  EXPECT_EQ(map_assignment(l), Permutation({1, 0}));
  LikelihoodMatrix none(2, {kImpossible, kImpossible, 0.0, 0.0});
  EXPECT_THROW(map_assignment(none), std::runtime_error);
}

TEST(MapAssignmentTest, MatchesExhaustiveSearch) {
  Rng rng(31);
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 1 + rng.uniform_index(6);
    auto l = random_matrix(n, rng, 5.0);
    // Integer-valued matrices produce many exact ties.
    if (c % 2 == 0)
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t j = 0; j < n; ++j) l(u, j) = std::floor(3 * l(u, j) / 5.0);
    const auto expected = oracle::brute_force_map(l);
    const auto got = map_assignment(l);
    EXPECT_EQ(std::vector<std::size_t>(got.forward().begin(), got.forward().end()), expected)
        << "case " << c;
  }
}

TEST(PosteriorTest, SingleUser) {
  const auto post = posterior_pi1(LikelihoodMatrix(1, {-3.0}));
  ASSERT_EQ(post.weights.size(), 1u);
  EXPECT_DOUBLE_EQ(post.weights[0], 1.0);
}

TEST(PosteriorTest, IdenticalUsersGiveUniformWeights) {
  const IidProfile p({0.2, 0.5, 0.3});
  const std::vector<IidProfile> profiles(4, p);
  const ObservationMatrix y(3, 4, {0, 1, 2, 2, 2, 2, 1, 0, 0, 1, 1, 1});
  const auto post = posterior_pi1(likelihood_matrix(profiles, count_stats(y, 3)));
  for (double w : post.weights) EXPECT_NEAR(w, 0.25, 1e-14);
}

TEST(PosteriorTest, MatchesEnumeration) {
  Rng rng(41);
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 1 + rng.uniform_index(6);
    const auto l = random_matrix(n, rng, 20.0);
    const auto expected = oracle::brute_force_posterior(l);
    const auto got = posterior_pi1(l).weights;
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(got[j], expected[j], 1e-12);
  }
}

TEST(PosteriorTest, SurvivesExtremeLogScales) {
  // Entries around -1e4 underflow exp() unless the rows are rescaled; a
  // spread of 2000 within rows forces the log-domain fallback.
  Rng rng(43);
  for (int c = 0; c < 20; ++c) {
    const std::size_t n = 2 + rng.uniform_index(5);
    auto l = random_matrix(n, rng, 2000.0);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t j = 0; j < n; ++j) l(u, j) -= 1e4;
    const auto expected = oracle::brute_force_posterior(l);
    const auto got = posterior_pi1(l).weights;
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(got[j], expected[j], 1e-10);
  }
}

TEST(PosteriorTest, ImpossibleCellsGetZeroWeight) {
  LikelihoodMatrix l(3, {0.0, -1.0, -2.0, kImpossible, 0.0, 0.0, kImpossible, 0.0, 0.0});
  const auto post = posterior_pi1(l);
  EXPECT_EQ(post.weights[1], 0.0);
  EXPECT_EQ(post.weights[2], 0.0);
  EXPECT_DOUBLE_EQ(post.weights[0], 1.0);
}

TEST(PosteriorTest, RowShiftsChangeNothing) {
  Rng rng(47);
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 2 + rng.uniform_index(7);
    const auto l = random_matrix(n, rng, 8.0);
    auto shifted = l;
    for (std::size_t u = 0; u < n; ++u) {
      const double shift = 100.0 * (rng.uniform() - 0.5);
      for (std::size_t j = 0; j < n; ++j) shifted(u, j) += shift;
    }
    EXPECT_EQ(map_assignment(l), map_assignment(shifted));
    const auto a = posterior_pi1(l).weights;
    const auto b = posterior_pi1(shifted).weights;
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(a[j], b[j], 1e-12);
  }
}

TEST(PosteriorTest, WeightsSumToOne) {
  Rng rng(53);
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 1 + rng.uniform_index(14);
    const auto post = posterior_pi1(random_matrix(n, rng, 30.0));
    double total = 0.0;
    for (double w : post.weights) total += w;
    EXPECT_NEAR(total, 1.0, 1e-10);
    EXPECT_LE(post.normalization_residual, 1e-10);
  }
}

TEST(PosteriorTest, RejectsOversizedInstances) {
  EXPECT_THROW(posterior_pi1(LikelihoodMatrix(5), 4), std::invalid_argument);
}

}  // namespace
}  // namespace locpriv
