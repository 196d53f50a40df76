#pragma once

// Two-agent episodic learning for hierarchical MDPs.
//
// The leader runs an optimistic Q-learning update (step size (H+1)/(H+tau),
// bonus inflated by sqrt(S B)); the follower runs model-based optimistic value
// iteration over the joint action space with a min-truncation that keeps Q2
// monotonically non-increasing. Counts are incremented while the episode is
// played; both value updates run after the episode, using the post-increment
// counts.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hier/bandit_agents.hpp"
#include "hier/env.hpp"
#include "hier/error.hpp"

namespace hier {

struct MdpParams {
  std::size_t states = 1;
  std::size_t leader_actions = 1;
  std::size_t follower_actions = 1;
  std::size_t horizon = 1;
  std::size_t episodes = 1;  // T
  double delta = 0.01;
  double c = 1.0;        // follower bonus constant
  double c_prime = 1.0;  // leader bonus constant
  // Power of S inside the leader bonus; 1 reproduces the standard bonus.
  double leader_state_power = 1.0;

  double log_term() const {
    return std::log(static_cast<double>(episodes) / delta);
  }

  void validate() const {
    require(states >= 1 && leader_actions >= 1 && follower_actions >= 1 && horizon >= 1,
            "MDP dimensions must be >= 1");
    require(episodes >= 1, "episode budget must be >= 1");
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
    require(c > 0.0 && c_prime > 0.0, "bonus constants must be positive");
  }
};

inline MdpParams params_for(const MdpInstance& inst, std::size_t episodes, double delta, double c,
                            double c_prime) {
  MdpParams p;
  p.states = inst.states();
  p.leader_actions = inst.leader_actions();
  p.follower_actions = inst.follower_actions();
  p.horizon = inst.horizon();
  p.episodes = episodes;
  p.delta = delta;
  p.c = c;
  p.c_prime = c_prime;
  return p;
}

inline double alpha(std::size_t tau, std::size_t horizon) {
  if (tau == 0) throw ContractError("step size is only defined for tau >= 1");
  const auto H = static_cast<double>(horizon);
  return (H + 1.0) / (H + static_cast<double>(tau));
}

// c' * sqrt(H^3 S B log(T/delta) / tau+)
inline double bonus1(std::size_t tau, const MdpParams& p) {
  const auto H = static_cast<double>(p.horizon);
  const double S = std::pow(static_cast<double>(p.states), p.leader_state_power);
  const auto B = static_cast<double>(p.follower_actions);
  const auto tau_plus = static_cast<double>(std::max<std::size_t>(tau, 1));
  return p.c_prime * std::sqrt(H * H * H * S * B * p.log_term() / tau_plus);
}

// c * sqrt(H^2 S log(T/delta) / tau+)
inline double bonus2(std::size_t tau, const MdpParams& p) {
  const auto H = static_cast<double>(p.horizon);
  const auto S = static_cast<double>(p.states);
  const auto tau_plus = static_cast<double>(std::max<std::size_t>(tau, 1));
  return p.c * std::sqrt(H * H * S * p.log_term() / tau_plus);
}

struct Transition {
  std::size_t state;
  std::size_t leader_action;
  std::size_t follower_action;
  double reward;
  std::size_t next_state;
};

class LeaderQTables {
 public:
  explicit LeaderQTables(MdpParams params) : p_(params) {
    p_.validate();
    const std::size_t S = p_.states, A = p_.leader_actions, H = p_.horizon;
    const double Hd = static_cast<double>(H);
    q_.assign(H * S * A, Hd);
    v_.assign((H + 1) * S, Hd);
    std::fill(v_.begin() + static_cast<std::ptrdiff_t>(H * S), v_.end(), 0.0);
    n_.assign(H * S * A, 0);
  }

  const MdpParams& params() const noexcept { return p_; }

  double q(std::size_t h, std::size_t s, std::size_t a) const { return q_.at(qi(h, s, a)); }
  double v(std::size_t h, std::size_t s) const { return v_.at(h * p_.states + s); }
  std::size_t visits(std::size_t h, std::size_t s, std::size_t a) const { return n_.at(qi(h, s, a)); }
  std::span<const double> q_table() const noexcept { return q_; }

  std::size_t act(std::size_t s, std::size_t h) const {
    require_index(h, p_.horizon, "step");
    require_index(s, p_.states, "state");
    return argmax_lowest(std::span<const double>(q_).subspan(qi(h, s, 0), p_.leader_actions));
  }

  void record_visit(std::size_t h, std::size_t s, std::size_t a) {
    require_index(a, p_.leader_actions, "leader action");
    ++n_[qi(h, s, a)];
  }

  // Replaces Q (e.g. from a snapshot) and recomputes V as min(max_a Q, H).
  // Visit counts are left untouched.
  void load_q_table(std::span<const double> q) {
    if (q.size() != q_.size()) throw ContractError("Q table shape mismatch");
    q_.assign(q.begin(), q.end());
    const double H = static_cast<double>(p_.horizon);
    for (std::size_t h = 0; h < p_.horizon; ++h)
      for (std::size_t s = 0; s < p_.states; ++s) {
        const auto row = std::span<const double>(q_).subspan(qi(h, s, 0), p_.leader_actions);
        v_[h * p_.states + s] = std::min(*std::max_element(row.begin(), row.end()), H);
      }
  }

  // trajectory[h] is step h of the episode just played.
  void episode_update(std::span<const Transition> trajectory) {
    if (trajectory.size() != p_.horizon) throw ContractError("trajectory must have H steps");
    const double H = static_cast<double>(p_.horizon);
    for (std::size_t h = 0; h < p_.horizon; ++h) {
      const auto& step = trajectory[h];
      const std::size_t i = qi(h, step.state, step.leader_action);
      const std::size_t tau = n_[i];
      if (tau == 0) throw InvariantError("leader update on a pair with zero visits");
      const double a = alpha(tau, p_.horizon);
      const double target = step.reward + v(h + 1, step.next_state) + bonus1(tau, p_);
      q_[i] = (1.0 - a) * q_[i] + a * target;
      const auto row = std::span<const double>(q_).subspan(qi(h, step.state, 0), p_.leader_actions);
      v_[h * p_.states + step.state] = std::min(*std::max_element(row.begin(), row.end()), H);
    }
  }

 private:
  std::size_t qi(std::size_t h, std::size_t s, std::size_t a) const {
    return (h * p_.states + s) * p_.leader_actions + a;
  }

  MdpParams p_;
  std::vector<double> q_;
  std::vector<double> v_;
  std::vector<std::size_t> n_;
};

class FollowerQTables {
 public:
  explicit FollowerQTables(MdpParams params) : p_(params) {
    p_.validate();
    const std::size_t S = p_.states, A = p_.leader_actions, B = p_.follower_actions, H = p_.horizon;
    const double Hd = static_cast<double>(H);
    q_.assign(H * S * A * B, Hd);
    v_.assign((H + 1) * S, Hd);
    std::fill(v_.begin() + static_cast<std::ptrdiff_t>(H * S), v_.end(), 0.0);
    n_.assign(H * S * A * B, 0);
    n_next_.assign(H * S * A * B * S, 0);
    theta_.assign(H * S * A * B, 0.0);
  }

  const MdpParams& params() const noexcept { return p_; }

  double q(std::size_t h, std::size_t s, std::size_t a, std::size_t b) const {
    return q_.at(qi(h, s, a, b));
  }
  double v(std::size_t h, std::size_t s) const { return v_.at(h * p_.states + s); }
  std::size_t visits(std::size_t h, std::size_t s, std::size_t a, std::size_t b) const {
    return n_.at(qi(h, s, a, b));
  }
  std::size_t visits(std::size_t h, std::size_t s, std::size_t a, std::size_t b, std::size_t sp) const {
    return n_next_.at(qi(h, s, a, b) * p_.states + sp);
  }
  std::span<const double> q_table() const noexcept { return q_; }

  // Best response to the observed leader action.
  std::size_t act(std::size_t s, std::size_t a, std::size_t h) const {
    require_index(h, p_.horizon, "step");
    require_index(s, p_.states, "state");
    require_index(a, p_.leader_actions, "leader action");
    return argmax_lowest(std::span<const double>(q_).subspan(qi(h, s, a, 0), p_.follower_actions));
  }

  // Joint argmax over (a, b), lowest flattened index a * B + b on ties.
  std::pair<std::size_t, std::size_t> joint_act(std::size_t s, std::size_t h) const {
    require_index(h, p_.horizon, "step");
    require_index(s, p_.states, "state");
    const std::size_t flat = argmax_lowest(
        std::span<const double>(q_).subspan(qi(h, s, 0, 0), p_.leader_actions * p_.follower_actions));
    return {flat / p_.follower_actions, flat % p_.follower_actions};
  }

  void record_visit(std::size_t h, const Transition& step) {
    check_reward(step.reward);
    require_index(step.next_state, p_.states, "next state");
    const std::size_t i = qi(h, step.state, step.leader_action, step.follower_action);
    ++n_[i];
    ++n_next_[i * p_.states + step.next_state];
    theta_[i] += step.reward;
  }

  // Replaces Q (e.g. from a snapshot) and recomputes V as max_{a,b} Q.
  // Counts and reward sums are left untouched.
  void load_q_table(std::span<const double> q) {
    if (q.size() != q_.size()) throw ContractError("Q table shape mismatch");
    q_.assign(q.begin(), q.end());
    const std::size_t AB = p_.leader_actions * p_.follower_actions;
    for (std::size_t h = 0; h < p_.horizon; ++h)
      for (std::size_t s = 0; s < p_.states; ++s) {
        const auto block = std::span<const double>(q_).subspan(qi(h, s, 0, 0), AB);
        v_[h * p_.states + s] = *std::max_element(block.begin(), block.end());
      }
  }

  // Empirical model at (h, s, a, b): uniform next-state law and zero reward
  // when the triple is unvisited.
  double empirical_reward(std::size_t h, std::size_t s, std::size_t a, std::size_t b) const {
    const std::size_t i = qi(h, s, a, b);
    return n_[i] == 0 ? 0.0 : theta_[i] / static_cast<double>(n_[i]);
  }
  double empirical_transition(std::size_t h, std::size_t s, std::size_t a, std::size_t b,
                              std::size_t sp) const {
    const std::size_t i = qi(h, s, a, b);
    return n_[i] == 0 ? 1.0 / static_cast<double>(p_.states)
                      : static_cast<double>(n_next_[i * p_.states + sp]) / static_cast<double>(n_[i]);
  }

  // Full backward sweep over every (h, s, a, b).
  void episode_update() {
    const std::size_t S = p_.states, A = p_.leader_actions, B = p_.follower_actions;
    for (std::size_t h = p_.horizon; h-- > 0;) {
      const double* next = &v_[(h + 1) * S];
      for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
          for (std::size_t b = 0; b < B; ++b) {
            const std::size_t i = qi(h, s, a, b);
            const std::size_t tau = n_[i];
            double estimate = empirical_reward(h, s, a, b) + bonus2(tau, p_);
            if (tau == 0) {
              for (std::size_t sp = 0; sp < S; ++sp) estimate += next[sp] / static_cast<double>(S);
            } else {
              const double inv = 1.0 / static_cast<double>(tau);
              for (std::size_t sp = 0; sp < S; ++sp) {
                estimate += static_cast<double>(n_next_[i * S + sp]) * inv * next[sp];
              }
            }
            q_[i] = std::min(estimate, q_[i]);
          }
        }
        const auto block = std::span<const double>(q_).subspan(qi(h, s, 0, 0), A * B);
        v_[h * S + s] = *std::max_element(block.begin(), block.end());
      }
    }
  }

 private:
  std::size_t qi(std::size_t h, std::size_t s, std::size_t a, std::size_t b) const {
    return ((h * p_.states + s) * p_.leader_actions + a) * p_.follower_actions + b;
  }

  MdpParams p_;
  std::vector<double> q_;
  std::vector<double> v_;
  std::vector<std::size_t> n_;
  std::vector<std::size_t> n_next_;
  std::vector<double> theta_;
};

// The deterministic policies the two act() calls would currently play.
inline JointPolicy greedy_policies(const LeaderQTables& leader, const FollowerQTables& follower) {
  const auto& p = leader.params();
  JointPolicy pi;
  pi.leader.resize(p.horizon * p.states);
  pi.follower.resize(p.horizon * p.states * p.leader_actions);
  for (std::size_t h = 0; h < p.horizon; ++h) {
    for (std::size_t s = 0; s < p.states; ++s) {
      pi.leader[h * p.states + s] = leader.act(s, h);
      for (std::size_t a = 0; a < p.leader_actions; ++a) {
        pi.follower[(h * p.states + s) * p.leader_actions + a] = follower.act(s, a, h);
      }
    }
  }
  return pi;
}

}  // namespace hier
