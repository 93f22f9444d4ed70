#include <gtest/gtest.h>

#include <map>
#include <stdexcept>
#include <vector>

#include "locpriv/anonymization.h"
#include "locpriv/random.h"

namespace locpriv {
namespace {

Trajectory path(std::vector<StateId> one_based) {
  Trajectory t;
  for (StateId s : one_based) t.states.push_back(s - 1);
  return t;
}

TEST(PermutationTest, InverseIsConsistent) {
  const Permutation p({2, 0, 1});
  for (std::size_t u = 0; u < 3; ++u) EXPECT_EQ(p.inverse(p(u)), u);
  EXPECT_THROW(Permutation({0, 0, 1}), std::invalid_argument);
  EXPECT_THROW(Permutation({0, 3, 1}), std::invalid_argument);
}

TEST(PermutationTest, SingleUserIsIdentity) {
  Rng rng(1);
  EXPECT_EQ(sample_permutation(1, rng), Permutation::identity(1));
}

TEST(PermutationTest, ThreeUsersAreUniform) {
  Rng rng(2);
  std::map<std::vector<std::size_t>, int> hits;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    const auto p = sample_permutation(3, rng);
    ++hits[std::vector<std::size_t>(p.forward().begin(), p.forward().end())];
  }
  ASSERT_EQ(hits.size(), 6u);
  double chi2 = 0.0;
  const double expected = draws / 6.0;
  for (const auto& [perm, h] : hits) chi2 += (h - expected) * (h - expected) / expected;
  // Upper 0.001 quantile of chi-square with 5 degrees of freedom.
  EXPECT_LT(chi2, 20.515);
}

TEST(AnonymizeTest, ThreeUserWorkedExample) {
  const std::vector<Trajectory> x = {path({1, 2, 3, 4}), path({2, 1, 3, 5}), path({4, 5, 1, 3})};
  // 1-based pseudonyms 3, 1, 2.
  const Permutation perm({2, 0, 1});
  const auto y = anonymize(x, perm);
  ASSERT_EQ(y.m(), 4u);
  ASSERT_EQ(y.n(), 3u);
  const std::vector<std::vector<StateId>> expected = {{1, 0, 2, 4}, {3, 4, 0, 2}, {0, 1, 2, 3}};
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(std::vector<StateId>(y.column(j).begin(), y.column(j).end()), expected[j]) << j;
  }
}

TEST(AnonymizeTest, IdentityKeepsColumns) {
  const std::vector<Trajectory> x = {path({1, 2}), path({2, 2})};
  const auto y = anonymize(x, Permutation::identity(2));
  EXPECT_EQ(y.at(0, 0), 0u);
  EXPECT_EQ(y.at(1, 0), 1u);
  EXPECT_EQ(y.at(0, 1), 1u);
}

TEST(AnonymizeTest, UnequalLengthsAreRejected) {
  const std::vector<Trajectory> x = {path({1, 2}), path({2})};
  EXPECT_THROW(anonymize(x, Permutation::identity(2)), std::invalid_argument);
}

TEST(ScheduleTest, RoundingAndFloor) {
  EXPECT_EQ(schedule_observations(10, ObservationSchedule(1.0, 2.0)), 100u);
  EXPECT_EQ(schedule_observations(3, ObservationSchedule(0.5, 1.0)), 2u);
  EXPECT_EQ(schedule_observations(1, ObservationSchedule(0.2, 2.0)), 1u);
}

TEST(ScheduleTest, RejectsNonPositiveScale) {
  EXPECT_THROW(ObservationSchedule(0.0, 1.0), std::invalid_argument);
}

TEST(ThresholdExponentTest, IidAndMarkov) {
  EXPECT_EQ(threshold_exponent(ModelDescriptor::iid(2)), 2.0);
  EXPECT_EQ(threshold_exponent(ModelDescriptor::iid(3)), 1.0);
  EXPECT_EQ(threshold_exponent(ModelDescriptor::markov(MobilityGraph::three_state_example())),
            2.0 / 3.0);
  EXPECT_THROW(threshold_exponent(ModelDescriptor::iid(1)), std::invalid_argument);
  const auto cycle = MobilityGraph::with_canonical_free_edges(3, {{0, 1}, {1, 2}, {2, 0}});
  EXPECT_THROW(threshold_exponent(ModelDescriptor::markov(cycle)), std::invalid_argument);
}

}  // namespace
}  // namespace locpriv
