#include <gtest/gtest.h>

#include <random>

#include "hier/baselines.hpp"
#include "hier/generators.hpp"
#include "hier/harness.hpp"

namespace hier {
namespace {

TEST(JointArms, FreshAndTrivial) {
  JointArmState s(3, 4, {100, 0.01});
  EXPECT_EQ(ci_bandit_select(s), (std::pair<std::size_t, std::size_t>{0, 0}));
  JointArmState one(1, 1, {100, 0.01});
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(one.select(), (std::pair<std::size_t, std::size_t>{0, 0}));
    one.observe(0, 0, 0.5);
  }
}

TEST(JointArms, FrozenTwoByTwo) {
  JointArmState s(2, 2, {1000, 0.01});
  for (int i = 0; i < 3; ++i) s.observe(0, 0, 0.5);
  for (int i = 0; i < 5; ++i) s.observe(0, 1, 0.8);
  for (int i = 0; i < 2; ++i) s.observe(1, 0, 0.1);
  for (int i = 0; i < 4; ++i) s.observe(1, 1, 0.9);
  EXPECT_NEAR(s.flat().index(0), 3.2704302271151833, 1e-12);
  EXPECT_NEAR(s.flat().index(1), 2.945966026289347, 1e-12);
  EXPECT_NEAR(s.flat().index(2), 3.493070212207556, 1e-12);
  EXPECT_NEAR(s.flat().index(3), 3.2992629560940405, 1e-12);
  EXPECT_EQ(s.select(), (std::pair<std::size_t, std::size_t>{1, 0}));
}

TEST(JointArms, EquivalentToFlattenedUcb1) {
  JointArmState joint(3, 2, {500, 0.05});
  Ucb1 flat(6, {500, 0.05});
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    const auto [a, b] = joint.select();
    const auto k = flat.select();
    ASSERT_EQ(a * 2 + b, k);
    const double r = u(gen);
    joint.observe(a, b, r);
    flat.observe(k, r);
  }
}

TEST(CentralizedMdp, JointArgmaxAttainsValue) {
  const auto m = random_mdp(3, 2, 3, 2, 21);
  CentralizedMdpAgent agent(params_for(m, 200, 0.1, 0.5, 0.5));
  RngStreams rs(3);
  for (int k = 0; k < 200; ++k) {
    std::size_t s = m.initial_state();
    for (std::size_t h = 0; h < 2; ++h) {
      const auto [a, b] = agent.act(s, h);
      const double r = sample_mdp_reward(m, s, a, b, rs.rewards);
      const auto sp = sample_transition(m, s, a, b, rs.transitions);
      agent.record_visit(h, {s, a, b, r, sp});
      s = sp;
    }
    agent.episode_update();
    for (std::size_t h = 0; h < 2; ++h)
      for (std::size_t st = 0; st < 3; ++st) {
        const auto [a, b] = agent.act(st, h);
        ASSERT_EQ(agent.tables().q(h, st, a, b), agent.tables().v(h, st));
        const auto pi = agent.policy();
        ASSERT_EQ(pi.leader[h * 3 + st], a);
        ASSERT_EQ(pi.follower[(h * 3 + st) * 2 + a], b);
      }
  }
}

TEST(CentralizedMdp, SingleLeaderActionMatchesHierarchy) {
  const auto m = random_mdp(3, 1, 3, 3, 33);
  RunConfig cfg;
  cfg.horizon = 400;
  cfg.seed = 17;
  cfg.record_actions = true;
  cfg.algorithm = Algorithm::kHierMdp;
  const auto hier = run(m, cfg);
  cfg.algorithm = Algorithm::kCiMdp;
  const auto ci = run(m, cfg);
  EXPECT_EQ(hier.actions, ci.actions);
  EXPECT_EQ(hier.cumulative, ci.cumulative);
}

TEST(CentralizedMdp, SublinearOnSmallInstance) {
  const auto m = random_mdp(2, 2, 2, 2, 3);
  RunConfig cfg;
  cfg.algorithm = Algorithm::kCiMdp;
  cfg.horizon = 20000;
  cfg.constants.c = 0.1;
  std::vector<RegretTrace> traces;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.seed = seed;
    traces.push_back(run(m, cfg));
  }
  const auto s = aggregate(traces);
  ASSERT_TRUE(s.exponent.has_value());
  EXPECT_LT(*s.exponent, 1.0);
  RecordProperty("exponent", std::to_string(*s.exponent));
}

}  // namespace
}  // namespace hier
