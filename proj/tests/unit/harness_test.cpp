#include <gtest/gtest.h>

#include <cmath>

#include "hier/generators.hpp"
#include "hier/harness.hpp"

namespace hier {
namespace {

RunConfig config(Algorithm alg, std::size_t T, std::uint64_t seed = 1) {
  RunConfig c;
  c.algorithm = alg;
  c.horizon = T;
  c.seed = seed;
  return c;
}

void expect_well_formed(const RegretTrace& tr) {
  double acc = 0.0;
  for (std::size_t t = 0; t < tr.size(); ++t) {
    ASSERT_GE(tr.instantaneous[t], -1e-12);
    acc += tr.instantaneous[t];
    ASSERT_DOUBLE_EQ(tr.cumulative[t], acc);
    if (t > 0) ASSERT_GE(tr.cumulative[t], tr.cumulative[t - 1] - 1e-12);
  }
}

TEST(Run, ZeroHorizonIsEmpty) {
  const auto inst = random_gap_bandit(2, 2, 0.1, 1);
  const auto tr = run(inst, config(Algorithm::kHierBandit, 0));
  EXPECT_EQ(tr.size(), 0u);
  EXPECT_EQ(tr.final_regret(), 0.0);
  EXPECT_EQ(run(random_mdp(2, 2, 2, 2, 1), config(Algorithm::kHierMdp, 0)).size(), 0u);
}

TEST(Run, SingleArmHasNoRegret) {
  const BanditInstance inst(1, 1, {0.4});
  const auto tr = run(inst, config(Algorithm::kHierBandit, 500));
  EXPECT_EQ(tr.final_regret(), 0.0);
  const MdpInstance m(1, 1, 1, 1, {0.7}, {1.0});
  EXPECT_EQ(run(m, config(Algorithm::kHierMdp, 500)).final_regret(), 0.0);
}

TEST(Run, Deterministic) {
  const auto inst = random_gap_bandit(4, 3, 0.05, 2);
  const auto a = run(inst, config(Algorithm::kHierBandit, 3000, 9));
  const auto b = run(inst, config(Algorithm::kHierBandit, 3000, 9));
  EXPECT_EQ(a.cumulative, b.cumulative);
  const auto m = random_mdp(3, 2, 2, 3, 4);
  EXPECT_EQ(run(m, config(Algorithm::kHierMdp, 300, 5)).cumulative,
            run(m, config(Algorithm::kHierMdp, 300, 5)).cumulative);
}

TEST(Run, TracesAreWellFormedForEveryAlgorithm) {
  const auto bandit = random_gap_bandit(3, 3, 0.1, 7);
  const auto multi = random_multi_follower(3, {2, 3}, 7);
  const auto deep = random_deep(3, 2, 7);
  const auto mdp = random_mdp(3, 2, 2, 3, 7);
  expect_well_formed(run(bandit, config(Algorithm::kHierBandit, 2000)));
  expect_well_formed(run(bandit, config(Algorithm::kCiBandit, 2000)));
  expect_well_formed(run(multi, config(Algorithm::kMultiFollower, 2000)));
  expect_well_formed(run(deep, config(Algorithm::kDeep, 2000)));
  expect_well_formed(run(deep, config(Algorithm::kCiBandit, 2000)));
  expect_well_formed(run(mdp, config(Algorithm::kHierMdp, 300)));
  expect_well_formed(run(mdp, config(Algorithm::kCiMdp, 300)));
}

TEST(Run, SmallMdpRegretGrowsSublinearly) {
  const auto m = random_mdp(2, 2, 2, 2, 11);
  double late = 0.0, early = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto tr = run(m, config(Algorithm::kHierMdp, 5000, seed));
    late += tr.cumulative[4999];
    early += tr.cumulative[1249];
  }
  EXPECT_LT(late / early, 4.0);
}

TEST(Run, SingleFollowerMatchesTwoAgentBandit) {
  const std::vector<double> mu = {0.2, 0.5, 0.9, 0.1, 0.3, 0.4};
  const BanditInstance two(2, 3, mu);
  const MultiFollowerInstance one(2, {3}, {mu});
  auto c1 = config(Algorithm::kHierBandit, 3000, 4);
  auto c2 = config(Algorithm::kMultiFollower, 3000, 4);
  c1.record_actions = c2.record_actions = true;
  const auto a = run(two, c1), b = run(one, c2);
  EXPECT_EQ(a.cumulative, b.cumulative);
  EXPECT_EQ(a.actions, b.actions);
}

TEST(Run, DeepRegretGrowsSublinearly) {
  const auto deep = random_deep(3, 2, 5);
  const auto tr = run(deep, config(Algorithm::kDeep, 100000, 3));
  EXPECT_LT(tr.cumulative[99999] / tr.cumulative[24999], 4.0);
}

TEST(Run, KindMismatchIsConfigError) {
  const auto bandit = random_gap_bandit(2, 2, 0.1, 1);
  const auto mdp = random_mdp(2, 2, 2, 2, 1);
  EXPECT_THROW(run(bandit, config(Algorithm::kHierMdp, 10)), ConfigError);
  EXPECT_THROW(run(mdp, config(Algorithm::kHierBandit, 10)), ConfigError);
  EXPECT_THROW(run(random_deep(2, 2, 1), config(Algorithm::kMultiFollower, 10)), ConfigError);
  auto bad = config(Algorithm::kHierBandit, 10);
  bad.constants.delta = 0.0;
  EXPECT_THROW(run(bandit, bad), ConfigError);
}

TEST(Run, InvariantBookkeeping) {
  const auto m = random_mdp(2, 2, 2, 2, 8);
  auto cfg = config(Algorithm::kHierMdp, 50);
  cfg.check_invariants = true;
  cfg.snapshot_every = 10;
  const auto tr = run(m, cfg);
  EXPECT_TRUE(tr.has_invariants);
  EXPECT_EQ(tr.optimism_violations.size(), 50u);
  EXPECT_EQ(tr.optimism_checked, 50u * 2 * 2 * 2 * 2);
  EXPECT_EQ(tr.monotonicity_violations, 0u);
  ASSERT_EQ(tr.snapshots.size(), 5u);
  EXPECT_EQ(tr.snapshots[4].episode, 50u);
  EXPECT_EQ(tr.snapshots[0].follower_q.size(), 16u);
  EXPECT_EQ(tr.snapshots[0].leader_q.size(), 8u);
}

TEST(RunSeeds, ParallelMatchesSequential) {
  const Instance inst = random_mdp(2, 2, 2, 2, 3);
  const std::vector<std::uint64_t> seeds = {5, 1, 9, 2, 7};
  const auto seq = run_seeds(inst, config(Algorithm::kHierMdp, 200), seeds, 1);
  const auto par = run_seeds(inst, config(Algorithm::kHierMdp, 200), seeds, 3);
  ASSERT_EQ(seq.size(), par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_EQ(seq[i].seed, seeds[i]);
    EXPECT_EQ(seq[i].cumulative, par[i].cumulative);
  }
}

RegretTrace trace_from(std::vector<double> cumulative) {
  RegretTrace tr;
  double prev = 0.0;
  for (double c : cumulative) {
    tr.push(c - prev);
    prev = c;
  }
  return tr;
}

TEST(Aggregate, IdenticalTracesHaveZeroSpread) {
  const auto tr = trace_from({0.5, 1.0, 1.2, 2.0, 2.5});
  const std::vector<RegretTrace> traces(4, tr);
  const auto s = aggregate(traces);
  EXPECT_EQ(s.horizon, 5u);
  for (const auto& cp : s.checkpoints) {
    EXPECT_EQ(cp.iqr(), 0.0);
    EXPECT_DOUBLE_EQ(cp.mean, tr.cumulative[cp.t - 1]);
  }
}

TEST(Aggregate, QuantilesLinear) {
  EXPECT_DOUBLE_EQ(quantile({3, 1, 2, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({3, 1, 2, 4}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile({7}, 0.75), 7.0);
  EXPECT_THROW(quantile({}, 0.5), ContractError);
}

TEST(Aggregate, GrowthExponent) {
  std::vector<double> root(100000), logt(100000);
  for (std::size_t t = 1; t <= root.size(); ++t) {
    root[t - 1] = std::sqrt(static_cast<double>(t));
    logt[t - 1] = std::log(static_cast<double>(t));
  }
  EXPECT_NEAR(*growth_exponent(root, 1, 100000), 0.5, 0.02);
  EXPECT_LT(*growth_exponent(logt, 10000, 100000), 0.2);
  EXPECT_FALSE(growth_exponent(std::vector<double>(10, 0.0), 1, 10).has_value());
  EXPECT_FALSE(growth_exponent(root, 50, 50).has_value());
  const auto [lo, hi] = default_exponent_window(100000);
  EXPECT_EQ(lo, 31623u);
  EXPECT_EQ(hi, 100000u);
}

TEST(Aggregate, ErrorsAndSchedule) {
  EXPECT_THROW(aggregate(std::span<const RegretTrace>{}), ContractError);
  const std::vector<RegretTrace> uneven = {trace_from({1, 2}), trace_from({1, 2, 3})};
  EXPECT_THROW(aggregate(uneven), ContractError);
  EXPECT_EQ(checkpoint_schedule(10), (std::vector<std::size_t>{1, 2, 4, 8, 10}));
  EXPECT_EQ(checkpoint_schedule(8), (std::vector<std::size_t>{1, 2, 4, 8}));
  EXPECT_TRUE(checkpoint_schedule(0).empty());
}

}  // namespace
}  // namespace hier
