#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "hier/bandit_agents.hpp"

namespace hier {
namespace {

LeaderParams leader_params(double B, std::size_t T = 1000) {
  LeaderParams p;
  p.kappa = 1.0;
  p.c = 1.0;
  p.horizon = T;
  p.delta = 0.01;
  p.follower_arms = B;
  return p;
}

// Drives the leader state to the given per-arm counts with constant rewards.
void feed(LeaderBanditState& s, std::size_t arm, std::size_t n, double mean) {
  for (std::size_t i = 0; i < n; ++i) s.observe(arm, mean);
}

TEST(LeaderIndex, FrozenValues) {
  LeaderBanditState s(2, leader_params(2.0));
  feed(s, 0, 10, 0.5);
  feed(s, 1, 5, 0.6);
  EXPECT_NEAR(s.index(0), 3.0904101425298203, 1e-12);
  EXPECT_NEAR(s.index(1), 4.2633931556744935, 1e-12);
  EXPECT_EQ(leader_select_arm(s), 1u);
}

TEST(LeaderIndex, UnpulledArmsUseOneAndTieLowest) {
  LeaderBanditState s(3, leader_params(2.0));
  const double L = std::log(1000 / 0.01);
  EXPECT_NEAR(s.index(2), std::sqrt(2 * L) + std::sqrt(L), 1e-12);
  EXPECT_EQ(s.select(), 0u);
  EXPECT_EQ(s.round(), 0u);
}

TEST(LeaderIndex, ObserveArithmetic) {
  LeaderBanditState s(2, leader_params(1.0));
  s.observe(1, 0.25);
  s.observe(1, 0.75);
  s.observe(0, 1.0);
  EXPECT_EQ(s.stats().count(1), 2u);
  EXPECT_DOUBLE_EQ(s.stats().mean(1), 0.5);
  EXPECT_EQ(s.round(), 3u);
  EXPECT_THROW(s.observe(0, 1.2), ContractError);
  EXPECT_THROW(s.observe(0, -0.1), ContractError);
  EXPECT_THROW(s.observe(2, 0.5), std::out_of_range);
}

TEST(LeaderIndex, BadParameters) {
  auto p = leader_params(2.0);
  p.kappa = 0.5;
  EXPECT_THROW(LeaderBanditState(2, p), ContractError);
  EXPECT_THROW(LeaderBanditState(0, leader_params(2.0)), ContractError);
  p = leader_params(2.0);
  p.delta = 1.0;
  EXPECT_THROW(LeaderBanditState(2, p), ContractError);
}

TEST(LeaderIndex, PermutationEquivariance) {
  std::mt19937_64 gen(4);
  std::uniform_int_distribution<int> cnt(0, 30);
  std::uniform_real_distribution<double> rew(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    constexpr std::size_t K = 5;
    std::array<std::size_t, K> perm;
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    LeaderBanditState a(K, leader_params(3.0)), b(K, leader_params(3.0));
    for (std::size_t k = 0; k < K; ++k) {
      const int n = cnt(gen);
      for (int i = 0; i < n; ++i) {
        const double r = rew(gen);
        a.observe(k, r);
        b.observe(perm[k], r);
      }
    }
    for (std::size_t k = 0; k < K; ++k) EXPECT_EQ(a.index(k), b.index(perm[k]));
  }
}

TEST(LeaderIndex, BonusShrinksWithCount) {
  // Same empirical mean, more pulls: strictly smaller index.
  LeaderBanditState s(2, leader_params(4.0));
  feed(s, 0, 3, 0.4);
  feed(s, 1, 4, 0.4);
  EXPECT_GT(s.index(0), s.index(1));
  double prev = s.index(1);
  for (int i = 0; i < 50; ++i) {
    s.observe(1, 0.4);
    const double cur = s.index(1);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(Ucb1, ForcedInitialisationInOrder) {
  Ucb1 u(3, {100, 0.01});
  for (std::size_t expected = 0; expected < 3; ++expected) {
    const auto b = u.select();
    EXPECT_EQ(b, expected);
    u.observe(b, 1.0);
  }
}

TEST(Ucb1, FrozenValues) {
  Ucb1 u(2, {10000, 0.01});
  for (int i = 0; i < 100; ++i) u.observe(0, 0.6);
  u.observe(1, 0.0);
  EXPECT_NEAR(u.index(0), 1.125652176975693, 1e-12);
  EXPECT_NEAR(u.index(1), 5.256521769756932, 1e-12);
  EXPECT_EQ(u.select(), 1u);
}

TEST(FollowerBank, InstancesAreIsolated) {
  FollowerBank<Ucb1> bank(3, Ucb1(2, {100, 0.01}));
  follower_observe(bank, 1, 0, 0.2);
  follower_observe(bank, 1, 1, 0.3);
  EXPECT_EQ(bank.instance(0).total_pulls(), 0u);
  EXPECT_EQ(bank.instance(1).total_pulls(), 2u);
  EXPECT_EQ(bank.instance(2).total_pulls(), 0u);
  EXPECT_EQ(follower_select_arm(bank, 0), 0u);
  EXPECT_THROW(bank.select(3), std::out_of_range);
}

TEST(FollowerBank, PullsMatchLeaderCounts) {
  // Simulated hierarchy on fixed means: follower pulls under a equal n(a).
  const std::array<double, 6> mu = {0.2, 0.5, 0.9, 0.1, 0.3, 0.4};
  std::mt19937_64 gen(8);
  std::bernoulli_distribution coin[6] = {std::bernoulli_distribution(mu[0]), std::bernoulli_distribution(mu[1]),
                                         std::bernoulli_distribution(mu[2]), std::bernoulli_distribution(mu[3]),
                                         std::bernoulli_distribution(mu[4]), std::bernoulli_distribution(mu[5])};
  constexpr std::size_t T = 2000;
  LeaderBanditState leader(2, leader_params(3.0, T));
  FollowerBank<Ucb1> bank(2, Ucb1(3, {T, 0.01}));
  for (std::size_t t = 0; t < T; ++t) {
    const auto a = leader.select();
    const auto b = bank.select(a);
    const double r = coin[a * 3 + b](gen) ? 1.0 : 0.0;
    leader.observe(a, r);
    bank.observe(a, b, r);
  }
  for (std::size_t a = 0; a < 2; ++a) EXPECT_EQ(bank.instance(a).total_pulls(), leader.stats().count(a));
  EXPECT_EQ(leader.round(), T);
}

TEST(MultiFollower, AverageArmCount) {
  const std::array<std::size_t, 2> b = {2, 4};
  const auto s = make_multi_follower_leader(3, b, leader_params(99.0));
  EXPECT_DOUBLE_EQ(s.params().follower_arms, 3.0);
}

TEST(MultiFollower, EqualCountsMatchSingleLeader) {
  const std::array<std::size_t, 3> b = {3, 3, 3};
  auto multi = make_multi_follower_leader(2, b, leader_params(1.0));
  LeaderBanditState single(2, leader_params(3.0));
  for (int i = 0; i < 7; ++i) {
    multi.observe(i % 2, 0.1 * i);
    single.observe(i % 2, 0.1 * i);
  }
  for (std::size_t a = 0; a < 2; ++a) EXPECT_EQ(multi.index(a), single.index(a));
  EXPECT_EQ(multi_follower_leader_select(multi), leader_select_arm(single));

  const std::array<std::size_t, 1> one = {3};
  auto n1 = make_multi_follower_leader(2, one, leader_params(1.0));
  for (int i = 0; i < 7; ++i) n1.observe(i % 2, 0.1 * i);
  for (std::size_t a = 0; a < 2; ++a) EXPECT_EQ(n1.index(a), single.index(a));
  EXPECT_THROW(make_multi_follower_leader(2, std::span<const std::size_t>{}, leader_params(1.0)), ContractError);
}

TEST(DeepConstants, Recursion) {
  EXPECT_EQ(deep_constants(2, 2.0), (std::vector<double>{20.0, 2.0}));
  EXPECT_EQ(deep_constants(3, 2.0), (std::vector<double>{128.0, 20.0, 2.0}));
  EXPECT_THROW(deep_constants(3, 1.9), ContractError);
  EXPECT_THROW(deep_constants(1, 2.0), ContractError);
  for (std::size_t D = 2; D <= 6; ++D) {
    for (double last : {2.0, 2.5, 7.0}) {
      const auto c = deep_constants(D, last);
      EXPECT_EQ(c.back(), last);
      for (std::size_t d = 0; d + 1 < D; ++d) EXPECT_EQ(c[d] - 6.0 * c[d + 1] - 8.0, 0.0);
    }
  }
}

TEST(DeepAgent, FreshSelectionAndLastLayerIndex) {
  DeepParams p{3, 2, 100, 0.1};
  DeepTeam team(p, 2.0);
  EXPECT_EQ(team.select(), (std::vector<std::size_t>{0, 0, 0}));

  // Layer D: A^(D-D) = 1, so the bonus is C_D sqrt(log(A^D T / delta) / n+).
  DeepAgentState last(3, 2.0, p);
  const std::array<std::size_t, 3> joint = {1, 0, 1};
  last.observe(joint, 0.5);
  last.observe(joint, 0.7);
  EXPECT_NEAR(last.index(std::span(joint).first(2), 1), 0.6 + 2.0 * std::sqrt(std::log(8 * 100 / 0.1) / 2), 1e-12);
  EXPECT_EQ(last.count(joint), 2u);
  EXPECT_THROW(last.select(std::span(joint).first(1)), ContractError);
}

TEST(DeepAgent, TwoLayerHandComputed) {
  DeepParams p{2, 2, 100, 0.1};
  DeepTeam team(p, 2.0);
  const std::array<std::size_t, 2> j01 = {0, 1}, j10 = {1, 0};
  team.observe(j01, 1.0);
  team.observe(j01, 0.0);
  team.observe(j01, 1.0);
  team.observe(j10, 0.5);
  const double L = std::log(4 * 100 / 0.1);
  const auto& top = team.agent(1);
  EXPECT_NEAR(top.index({}, 0), 2.0 / 3.0 + 20.0 * std::sqrt(2.0 * L / 3.0), 1e-12);
  EXPECT_NEAR(top.index({}, 1), 0.5 + 20.0 * std::sqrt(2.0 * L), 1e-12);
  const auto& bottom = team.agent(2);
  const std::array<std::size_t, 1> a0 = {0};
  EXPECT_NEAR(bottom.index(a0, 1), 2.0 / 3.0 + 2.0 * std::sqrt(L / 3.0), 1e-12);
  EXPECT_EQ(team.select(), (std::vector<std::size_t>{1, 0}));
  EXPECT_THROW(team.observe(a0, 0.5), ContractError);
}

TEST(DeepAgent, LayerCountsSumToRound) {
  DeepParams p{3, 3, 500, 0.05};
  DeepTeam team(p, 2.0);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) team.observe(team.select(), u(gen));
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto counts = team.agent(d).counts();
    EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::size_t{0}), 500u);
  }
}

}  // namespace
}  // namespace hier
