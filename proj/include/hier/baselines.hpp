#pragma once

// Centralized yardsticks: one fictitious coordinator that picks the joint
// action directly, which is what a shared-seed common-information protocol
// reduces to.

#include <cstddef>
#include <utility>

#include "hier/bandit_agents.hpp"
#include "hier/env.hpp"
#include "hier/mdp_agents.hpp"

namespace hier {

// UCB1 over the A*B joint arms, flattened as a * B + b.
class JointArmState {
 public:
  JointArmState(std::size_t leader_arms, std::size_t follower_arms, Ucb1::Params params)
      : B_(follower_arms), ucb_(leader_arms * follower_arms, params) {
    require(follower_arms >= 1, "need at least one follower arm");
  }

  std::pair<std::size_t, std::size_t> select() const {
    const std::size_t flat = ucb_.select();
    return {flat / B_, flat % B_};
  }

  void observe(std::size_t a, std::size_t b, double reward) { ucb_.observe(a * B_ + b, reward); }

  const Ucb1& flat() const noexcept { return ucb_; }

 private:
  std::size_t B_;
  Ucb1 ucb_;
};

inline std::pair<std::size_t, std::size_t> ci_bandit_select(const JointArmState& s) { return s.select(); }

// Optimistic value iteration over the joint action space, acting jointly.
class CentralizedMdpAgent {
 public:
  explicit CentralizedMdpAgent(MdpParams params) : tables_(params) {}

  std::pair<std::size_t, std::size_t> act(std::size_t s, std::size_t h) const {
    return tables_.joint_act(s, h);
  }

  void record_visit(std::size_t h, const Transition& step) { tables_.record_visit(h, step); }
  void episode_update() { tables_.episode_update(); }

  // Joint greedy policy in JointPolicy form: the leader slot holds the joint
  // argmax's a, the follower slot the best b for every a.
  JointPolicy policy() const {
    const auto& p = tables_.params();
    JointPolicy pi;
    pi.leader.resize(p.horizon * p.states);
    pi.follower.resize(p.horizon * p.states * p.leader_actions);
    for (std::size_t h = 0; h < p.horizon; ++h) {
      for (std::size_t s = 0; s < p.states; ++s) {
        pi.leader[h * p.states + s] = tables_.joint_act(s, h).first;
        for (std::size_t a = 0; a < p.leader_actions; ++a) {
          pi.follower[(h * p.states + s) * p.leader_actions + a] = tables_.act(s, a, h);
        }
      }
    }
    return pi;
  }

  const FollowerQTables& tables() const noexcept { return tables_; }

 private:
  FollowerQTables tables_;
};

}  // namespace hier
