#pragma once

// Bandit-side agents: the hierarchical leader's index policy, UCB1 followers
// (one instance per leader arm), and the per-layer agents of a deep hierarchy.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "hier/error.hpp"

namespace hier {

inline void check_reward(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw ContractError("reward must lie in [0,1]");
}

// Lowest index among the maxima.
inline std::size_t argmax_lowest(std::span<const double> xs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] > xs[best]) best = i;
  }
  return best;
}

// Per-arm pull counts and reward sums shared by every index policy here.
class ArmStats {
 public:
  explicit ArmStats(std::size_t arms) : counts_(arms, 0), sums_(arms, 0.0) {}

  std::size_t arms() const noexcept { return counts_.size(); }
  std::size_t count(std::size_t arm) const { return counts_.at(arm); }
  double reward_sum(std::size_t arm) const { return sums_.at(arm); }
  std::size_t total() const noexcept { return total_; }
  std::span<const std::size_t> counts() const noexcept { return counts_; }

  // Empirical mean with the n+ = max(n, 1) convention, so unpulled arms read 0.
  double mean(std::size_t arm) const {
    return sums_.at(arm) / static_cast<double>(std::max<std::size_t>(counts_.at(arm), 1));
  }

  void add(std::size_t arm, double reward) {
    require_index(arm, counts_.size(), "arm");
    check_reward(reward);
    ++counts_[arm];
    sums_[arm] += reward;
    ++total_;
  }

 private:
  std::vector<std::size_t> counts_;
  std::vector<double> sums_;
  std::size_t total_ = 0;
};

// What a follower algorithm must provide to sit in a FollowerBank.
template <typename Alg>
concept BanditAlgorithm = requires(Alg alg, const Alg calg, std::size_t arm, double r) {
  { alg.select() } -> std::convertible_to<std::size_t>;
  alg.observe(arm, r);
  { calg.total_pulls() } -> std::convertible_to<std::size_t>;
};

// UCB1 with the fixed-budget confidence radius sqrt(2 log(T/delta) / n).
// Every unplayed arm is tried once (lowest index first) before the index applies.
class Ucb1 {
 public:
  struct Params {
    std::size_t horizon = 1;
    double delta = 0.01;
  };

  Ucb1(std::size_t arms, Params params) : stats_(arms), params_(params) {
    require(arms >= 1, "UCB1 needs at least one arm");
    require(params.horizon >= 1, "horizon must be >= 1");
    require(params.delta > 0.0 && params.delta < 1.0, "delta must lie in (0,1)");
    log_term_ = std::log(static_cast<double>(params.horizon) / params.delta);
  }

  double index(std::size_t arm) const {
    const auto n = static_cast<double>(stats_.count(arm));
    return stats_.mean(arm) + std::sqrt(2.0 * log_term_ / n);
  }

  std::size_t select() const {
    for (std::size_t b = 0; b < stats_.arms(); ++b) {
      if (stats_.count(b) == 0) return b;
    }
    std::vector<double> idx(stats_.arms());
    for (std::size_t b = 0; b < idx.size(); ++b) idx[b] = index(b);
    return argmax_lowest(idx);
  }

  void observe(std::size_t arm, double reward) { stats_.add(arm, reward); }

  std::size_t total_pulls() const noexcept { return stats_.total(); }
  const ArmStats& stats() const noexcept { return stats_; }
  const Params& params() const noexcept { return params_; }

 private:
  ArmStats stats_;
  Params params_;
  double log_term_;
};

static_assert(BanditAlgorithm<Ucb1>);

// One independent follower algorithm per leader arm; ALG(a) only ever sees
// rounds where the leader played a.
template <BanditAlgorithm Alg = Ucb1>
class FollowerBank {
 public:
  FollowerBank(std::size_t leader_arms, const Alg& prototype) : instances_(leader_arms, prototype) {
    require(leader_arms >= 1, "follower bank needs at least one leader arm");
  }

  std::size_t select(std::size_t leader_arm) const {
    require_index(leader_arm, instances_.size(), "leader arm");
    return instances_[leader_arm].select();
  }

  void observe(std::size_t leader_arm, std::size_t follower_arm, double reward) {
    require_index(leader_arm, instances_.size(), "leader arm");
    instances_[leader_arm].observe(follower_arm, reward);
  }

  const Alg& instance(std::size_t leader_arm) const { return instances_.at(leader_arm); }
  std::size_t leader_arms() const noexcept { return instances_.size(); }

 private:
  std::vector<Alg> instances_;
};

struct LeaderParams {
  double kappa = 1.0;
  double c = 1.0;
  std::size_t horizon = 1;
  double delta = 0.01;
  // Follower arm count entering the bonus; the average count with several followers.
  double follower_arms = 1.0;
};

// Hierarchical leader. Index of arm a:
//   mu_hat(a) + sqrt(kappa * B * log(T/delta) / n+(a)) + c * sqrt(log(T/delta) / n+(a))
// No forced initialization; n+ keeps the bonus finite for unpulled arms.
class LeaderBanditState {
 public:
  LeaderBanditState(std::size_t arms, LeaderParams params) : stats_(arms), params_(params) {
    require(arms >= 1, "leader needs at least one arm");
    require(params.kappa >= 1.0, "kappa must be >= 1");
    require(params.c > 0.0, "c must be > 0");
    require(params.horizon >= 1, "horizon must be >= 1");
    require(params.delta > 0.0 && params.delta < 1.0, "delta must lie in (0,1)");
    require(params.follower_arms > 0.0, "follower arm count must be positive");
    log_term_ = std::log(static_cast<double>(params.horizon) / params.delta);
  }

  double index(std::size_t arm) const {
    const auto n_plus = static_cast<double>(std::max<std::size_t>(stats_.count(arm), 1));
    return stats_.mean(arm) + std::sqrt(params_.kappa * params_.follower_arms * log_term_ / n_plus) +
           params_.c * std::sqrt(log_term_ / n_plus);
  }

  std::size_t select() const {
    std::vector<double> idx(stats_.arms());
    for (std::size_t a = 0; a < idx.size(); ++a) idx[a] = index(a);
    return argmax_lowest(idx);
  }

  void observe(std::size_t arm, double reward) { stats_.add(arm, reward); }

  std::size_t round() const noexcept { return stats_.total(); }
  const ArmStats& stats() const noexcept { return stats_; }
  const LeaderParams& params() const noexcept { return params_; }

 private:
  ArmStats stats_;
  LeaderParams params_;
  double log_term_;
};

// Free-function surface used by the harness.
inline std::size_t leader_select_arm(const LeaderBanditState& s) { return s.select(); }
inline void leader_observe(LeaderBanditState& s, std::size_t arm, double r) { s.observe(arm, r); }

template <BanditAlgorithm Alg>
std::size_t follower_select_arm(const FollowerBank<Alg>& bank, std::size_t leader_arm) {
  return bank.select(leader_arm);
}
template <BanditAlgorithm Alg>
void follower_observe(FollowerBank<Alg>& bank, std::size_t leader_arm, std::size_t arm, double r) {
  bank.observe(leader_arm, arm, r);
}

// Leader facing N followers: same index, with B set to the average arm count.
inline LeaderBanditState make_multi_follower_leader(std::size_t leader_arms,
                                                    std::span<const std::size_t> follower_arm_counts,
                                                    LeaderParams params) {
  require(!follower_arm_counts.empty(), "need at least one follower");
  double sum = 0.0;
  for (auto b : follower_arm_counts) sum += static_cast<double>(b);
  params.follower_arms = sum / static_cast<double>(follower_arm_counts.size());
  return LeaderBanditState(leader_arms, params);
}

inline std::size_t multi_follower_leader_select(const LeaderBanditState& s) { return s.select(); }

// ---------------------------------------------------------------------------
// Deep hierarchy

// C_1..C_D (element d-1 holds C_d) with C_d = 6 C_{d+1} + 8.
inline std::vector<double> deep_constants(std::size_t depth, double last) {
  require(depth >= 2, "deep hierarchy needs D >= 2");
  require(last >= 2.0, "C_D must be >= 2");
  std::vector<double> c(depth);
  c[depth - 1] = last;
  for (std::size_t d = depth - 1; d-- > 0;) c[d] = 6.0 * c[d + 1] + 8.0;
  return c;
}

struct DeepParams {
  std::size_t depth = 2;
  std::size_t arms = 1;
  std::size_t horizon = 1;
  double delta = 0.01;
};

// Agent on layer d (1-based). Keeps a count and reward sum for every prefix
// (a^1..a^d), stored densely with a^1 the most significant digit. Index of own
// arm a after prefix p:
//   mu_hat(p, a) + C_d * sqrt(A^(D-d) * log(A^D T / delta) / n+(p, a))
class DeepAgentState {
 public:
  DeepAgentState(std::size_t layer, double constant, DeepParams params)
      : layer_(layer), constant_(constant), params_(params) {
    require(params.depth >= 2, "deep hierarchy needs D >= 2");
    require(layer >= 1 && layer <= params.depth, "layer must lie in 1..D");
    require(params.arms >= 1, "need at least one arm per layer");
    require(params.horizon >= 1, "horizon must be >= 1");
    require(params.delta > 0.0 && params.delta < 1.0, "delta must lie in (0,1)");
    std::size_t prefixes = 1;
    for (std::size_t i = 0; i < layer; ++i) prefixes *= params.arms;
    counts_.assign(prefixes, 0);
    sums_.assign(prefixes, 0.0);
    const double A = static_cast<double>(params.arms);
    const double D = static_cast<double>(params.depth);
    const double log_term = std::log(std::pow(A, D) * static_cast<double>(params.horizon) / params.delta);
    bonus_scale_ = constant_ * std::sqrt(std::pow(A, D - static_cast<double>(layer)) * log_term);
  }

  std::size_t layer() const noexcept { return layer_; }
  double constant() const noexcept { return constant_; }

  double index(std::span<const std::size_t> prefix, std::size_t arm) const {
    const std::size_t key = key_of(prefix, arm);
    const auto n_plus = static_cast<double>(std::max<std::size_t>(counts_[key], 1));
    return sums_[key] / n_plus + bonus_scale_ / std::sqrt(n_plus);
  }

  // prefix holds the arms of layers 1..d-1.
  std::size_t select(std::span<const std::size_t> prefix) const {
    if (prefix.size() + 1 != layer_) throw ContractError("prefix must hold the d-1 earlier arms");
    std::vector<double> idx(params_.arms);
    for (std::size_t a = 0; a < idx.size(); ++a) idx[a] = index(prefix, a);
    return argmax_lowest(idx);
  }

  // joint_prefix holds layers 1..d including this agent's own arm.
  void observe(std::span<const std::size_t> joint_prefix, double reward) {
    if (joint_prefix.size() != layer_) throw ContractError("prefix must hold arms of layers 1..d");
    check_reward(reward);
    const std::size_t key = key_of(joint_prefix.first(layer_ - 1), joint_prefix[layer_ - 1]);
    ++counts_[key];
    sums_[key] += reward;
  }

  std::size_t count(std::span<const std::size_t> joint_prefix) const {
    if (joint_prefix.size() != layer_) throw ContractError("prefix must hold arms of layers 1..d");
    return counts_[key_of(joint_prefix.first(layer_ - 1), joint_prefix[layer_ - 1])];
  }

  std::span<const std::size_t> counts() const noexcept { return counts_; }

 private:
  std::size_t key_of(std::span<const std::size_t> prefix, std::size_t arm) const {
    std::size_t key = 0;
    for (std::size_t a : prefix) {
      require_index(a, params_.arms, "layer arm");
      key = key * params_.arms + a;
    }
    require_index(arm, params_.arms, "layer arm");
    return key * params_.arms + arm;
  }

  std::size_t layer_;
  double constant_;
  DeepParams params_;
  double bonus_scale_;
  std::vector<std::size_t> counts_;
  std::vector<double> sums_;
};

inline std::size_t deep_select_arm(const DeepAgentState& s, std::span<const std::size_t> prefix) {
  return s.select(prefix);
}
inline void deep_observe(DeepAgentState& s, std::span<const std::size_t> joint_prefix, double r) {
  s.observe(joint_prefix, r);
}

// The D agents acting in order, each seeing all earlier choices.
class DeepTeam {
 public:
  DeepTeam(DeepParams params, double last_constant) : params_(params) {
    const auto c = deep_constants(params.depth, last_constant);
    agents_.reserve(params.depth);
    for (std::size_t d = 1; d <= params.depth; ++d) agents_.emplace_back(d, c[d - 1], params);
  }

  std::vector<std::size_t> select() const {
    std::vector<std::size_t> joint;
    joint.reserve(params_.depth);
    for (const auto& agent : agents_) joint.push_back(agent.select(joint));
    return joint;
  }

  void observe(std::span<const std::size_t> joint, double reward) {
    if (joint.size() != params_.depth) throw ContractError("joint action must have D entries");
    for (auto& agent : agents_) agent.observe(joint.first(agent.layer()), reward);
  }

  const DeepAgentState& agent(std::size_t layer) const { return agents_.at(layer - 1); }

 private:
  DeepParams params_;
  std::vector<DeepAgentState> agents_;
};

}  // namespace hier
