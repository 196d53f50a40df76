#pragma once

// Environment instances, seeded sampling, and exact oracle quantities.
//
// Indices are zero-based throughout: arms 0..A-1, steps h = 0..H-1, with the
// terminal value row stored at h = H. No relabeling is ever applied; the oracle
// finds maxima wherever they sit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hier/error.hpp"
#include "hier/rng.hpp"

namespace hier {

inline constexpr double kStochasticTolerance = 1e-9;

enum class NoiseKind { kBernoulli, kUniformBounded };

enum class InstanceKind { kBandit, kMultiFollower, kDeep, kMdp };

inline const char* to_string(NoiseKind n) {
  return n == NoiseKind::kBernoulli ? "bernoulli" : "uniform";
}

inline const char* to_string(InstanceKind k) {
  switch (k) {
    case InstanceKind::kBandit: return "bandit";
    case InstanceKind::kMultiFollower: return "multi_follower";
    case InstanceKind::kDeep: return "deep";
    case InstanceKind::kMdp: return "mdp";
  }
  return "?";
}

namespace detail {

inline void check_unit_interval(std::span<const double> xs, const char* what) {
  for (double x : xs) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw ConfigError(std::string(what) + " must lie in [0,1], got " + std::to_string(x), what);
    }
  }
}

inline std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace detail

// Draw a reward in [0,1] with the given mean. One uniform is consumed per call.
inline double sample_reward(NoiseKind noise, double mean, Rng& rng) {
  const double u = rng.uniform();
  if (noise == NoiseKind::kBernoulli) return u < mean ? 1.0 : 0.0;
  // Symmetric uniform around the mean with half-width min(m, 1-m): stays in
  // [0,1] and has mean exactly m.
  const double half = std::min(mean, 1.0 - mean);
  return std::clamp(mean + half * (2.0 * u - 1.0), 0.0, 1.0);
}

// Two-agent bandit: mean reward of joint arm (a, b).
class BanditInstance {
 public:
  BanditInstance(std::size_t leader_arms, std::size_t follower_arms, std::vector<double> means,
                 NoiseKind noise = NoiseKind::kBernoulli)
      : A_(leader_arms), B_(follower_arms), means_(std::move(means)), noise_(noise) {
    if (A_ < 1 || B_ < 1) throw ConfigError("bandit needs A >= 1 and B >= 1", "A");
    if (means_.size() != A_ * B_) throw ConfigError("means must be an A x B matrix", "means");
    detail::check_unit_interval(means_, "means");
  }

  std::size_t leader_arms() const noexcept { return A_; }
  std::size_t follower_arms() const noexcept { return B_; }
  NoiseKind noise() const noexcept { return noise_; }
  std::span<const double> means() const noexcept { return means_; }

  double mean(std::size_t a, std::size_t b) const {
    require_index(a, A_, "leader arm");
    require_index(b, B_, "follower arm");
    return means_[a * B_ + b];
  }

 private:
  std::size_t A_, B_;
  std::vector<double> means_;
  NoiseKind noise_;
};

// Follower i sees mean means[i][a * B^i + b].
class MultiFollowerInstance {
 public:
  MultiFollowerInstance(std::size_t leader_arms, std::vector<std::size_t> follower_arm_counts,
                        std::vector<std::vector<double>> means,
                        NoiseKind noise = NoiseKind::kBernoulli)
      : A_(leader_arms), B_(std::move(follower_arm_counts)), means_(std::move(means)), noise_(noise) {
    if (A_ < 1) throw ConfigError("multi-follower needs A >= 1", "A");
    if (B_.empty()) throw ConfigError("multi-follower needs at least one follower", "B_list");
    if (means_.size() != B_.size()) throw ConfigError("one mean matrix per follower", "means");
    for (std::size_t i = 0; i < B_.size(); ++i) {
      if (B_[i] < 1) throw ConfigError("every follower needs >= 1 arm", "B_list");
      if (means_[i].size() != A_ * B_[i]) {
        throw ConfigError("means[" + std::to_string(i) + "] must be A x B^i", "means");
      }
      detail::check_unit_interval(means_[i], "means");
    }
  }

  std::size_t leader_arms() const noexcept { return A_; }
  std::size_t num_followers() const noexcept { return B_.size(); }
  std::size_t follower_arms(std::size_t i) const { return B_.at(i); }
  std::span<const std::size_t> follower_arm_counts() const noexcept { return B_; }
  NoiseKind noise() const noexcept { return noise_; }

  double average_arm_count() const {
    return static_cast<double>(std::accumulate(B_.begin(), B_.end(), std::size_t{0})) /
           static_cast<double>(B_.size());
  }

  double mean(std::size_t follower, std::size_t a, std::size_t b) const {
    require_index(follower, B_.size(), "follower");
    require_index(a, A_, "leader arm");
    require_index(b, B_[follower], "follower arm");
    return means_[follower][a * B_[follower] + b];
  }

  const std::vector<double>& means(std::size_t follower) const { return means_.at(follower); }

 private:
  std::size_t A_;
  std::vector<std::size_t> B_;
  std::vector<std::vector<double>> means_;
  NoiseKind noise_;
};

// D agents with A arms each. Joint arm (a^1..a^D) is stored row-major with a^1
// the most significant digit.
class DeepBanditInstance {
 public:
  DeepBanditInstance(std::size_t depth, std::size_t arms_per_layer, std::vector<double> means,
                     NoiseKind noise = NoiseKind::kBernoulli)
      : D_(depth), A_(arms_per_layer), means_(std::move(means)), noise_(noise) {
    if (D_ < 2) throw ConfigError("deep hierarchy needs D >= 2", "D");
    if (A_ < 1) throw ConfigError("deep hierarchy needs A >= 1", "A");
    if (means_.size() != detail::ipow(A_, D_)) throw ConfigError("means must have A^D entries", "means");
    detail::check_unit_interval(means_, "means");
  }

  std::size_t depth() const noexcept { return D_; }
  std::size_t arms_per_layer() const noexcept { return A_; }
  std::size_t num_joint_arms() const noexcept { return means_.size(); }
  NoiseKind noise() const noexcept { return noise_; }
  std::span<const double> means() const noexcept { return means_; }

  std::size_t flat_index(std::span<const std::size_t> joint) const {
    if (joint.size() != D_) throw ContractError("joint action must have D entries");
    std::size_t idx = 0;
    for (std::size_t a : joint) {
      require_index(a, A_, "layer arm");
      idx = idx * A_ + a;
    }
    return idx;
  }

  double mean(std::span<const std::size_t> joint) const { return means_[flat_index(joint)]; }

 private:
  std::size_t D_, A_;
  std::vector<double> means_;
  NoiseKind noise_;
};

// Finite-horizon tabular MDP with a leader action a and follower action b per step.
// Rewards and transitions are stationary across steps.
class MdpInstance {
 public:
  MdpInstance(std::size_t states, std::size_t leader_actions, std::size_t follower_actions,
              std::size_t horizon, std::vector<double> rewards, std::vector<double> transitions,
              std::size_t initial_state = 0, NoiseKind noise = NoiseKind::kBernoulli)
      : S_(states), A_(leader_actions), B_(follower_actions), H_(horizon),
        rewards_(std::move(rewards)), transitions_(std::move(transitions)),
        initial_(initial_state), noise_(noise) {
    if (S_ < 1) throw ConfigError("MDP needs S >= 1", "S");
    if (A_ < 1) throw ConfigError("MDP needs A >= 1", "A");
    if (B_ < 1) throw ConfigError("MDP needs B >= 1", "B");
    if (H_ < 1) throw ConfigError("MDP needs H >= 1", "H");
    if (rewards_.size() != S_ * A_ * B_) throw ConfigError("rewards must be S x A x B", "rewards");
    if (transitions_.size() != S_ * A_ * B_ * S_) {
      throw ConfigError("transitions must be S x A x B x S", "transitions");
    }
    if (initial_ >= S_) throw ConfigError("initial_state out of range", "initial_state");
    detail::check_unit_interval(rewards_, "rewards");
    for (std::size_t row = 0; row < S_ * A_ * B_; ++row) {
      double sum = 0.0;
      for (std::size_t sp = 0; sp < S_; ++sp) {
        const double p = transitions_[row * S_ + sp];
        if (!(p >= 0.0)) throw ConfigError("transition probabilities must be >= 0", "transitions");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kStochasticTolerance) {
        throw ConfigError("transition row " + std::to_string(row) + " sums to " +
                              std::to_string(sum) + ", expected 1",
                          "transitions");
      }
    }
  }

  std::size_t states() const noexcept { return S_; }
  std::size_t leader_actions() const noexcept { return A_; }
  std::size_t follower_actions() const noexcept { return B_; }
  std::size_t horizon() const noexcept { return H_; }
  std::size_t initial_state() const noexcept { return initial_; }
  NoiseKind noise() const noexcept { return noise_; }
  std::span<const double> rewards() const noexcept { return rewards_; }
  std::span<const double> transitions() const noexcept { return transitions_; }

  double reward(std::size_t s, std::size_t a, std::size_t b) const {
    check(s, a, b);
    return rewards_[(s * A_ + a) * B_ + b];
  }

  std::span<const double> next_state_distribution(std::size_t s, std::size_t a, std::size_t b) const {
    check(s, a, b);
    return std::span<const double>(transitions_).subspan(((s * A_ + a) * B_ + b) * S_, S_);
  }

 private:
  void check(std::size_t s, std::size_t a, std::size_t b) const {
    require_index(s, S_, "state");
    require_index(a, A_, "leader action");
    require_index(b, B_, "follower action");
  }

  std::size_t S_, A_, B_, H_;
  std::vector<double> rewards_;
  std::vector<double> transitions_;
  std::size_t initial_;
  NoiseKind noise_;
};

inline double sample_bandit_reward(const BanditInstance& inst, std::size_t a, std::size_t b, Rng& rng) {
  return sample_reward(inst.noise(), inst.mean(a, b), rng);
}

inline double sample_mdp_reward(const MdpInstance& inst, std::size_t s, std::size_t a, std::size_t b,
                                Rng& rng) {
  return sample_reward(inst.noise(), inst.reward(s, a, b), rng);
}

// Inverse-CDF over a single uniform draw.
inline std::size_t sample_transition(const MdpInstance& inst, std::size_t s, std::size_t a,
                                     std::size_t b, Rng& rng) {
  const auto dist = inst.next_state_distribution(s, a, b);
  const double u = rng.uniform();
  double cdf = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t sp = 0; sp < dist.size(); ++sp) {
    if (dist[sp] > 0.0) last_positive = sp;
    cdf += dist[sp];
    if (u < cdf) return sp;
  }
  // Rounding left the cumulative sum just under 1.
  return last_positive;
}

// ---------------------------------------------------------------------------
// Oracle

struct OptimalProfile {
  InstanceKind kind = InstanceKind::kBandit;
  std::size_t leader_arms = 0;
  std::size_t follower_arms = 0;  // B for bandit/MDP, joint-arm count for deep, 0 for multi
  std::size_t states = 0;
  std::size_t horizon = 0;

  double best_joint_mean = 0.0;
  std::vector<double> best_follower_mean_per_leader_arm;

  // MDP only. optimal_values is (H+1) x S, optimal_q is H x S x A x B.
  std::vector<double> optimal_values;
  std::vector<double> optimal_q;

  double value(std::size_t h, std::size_t s) const { return optimal_values.at(h * states + s); }
  double q(std::size_t h, std::size_t s, std::size_t a, std::size_t b) const {
    return optimal_q.at(((h * states + s) * leader_arms + a) * follower_arms + b);
  }
};

inline OptimalProfile compute_optimal_profile(const BanditInstance& inst) {
  OptimalProfile p;
  p.kind = InstanceKind::kBandit;
  p.leader_arms = inst.leader_arms();
  p.follower_arms = inst.follower_arms();
  p.best_follower_mean_per_leader_arm.resize(p.leader_arms);
  const auto means = inst.means();
  for (std::size_t a = 0; a < p.leader_arms; ++a) {
    const auto row = means.subspan(a * p.follower_arms, p.follower_arms);
    p.best_follower_mean_per_leader_arm[a] = *std::max_element(row.begin(), row.end());
  }
  p.best_joint_mean = *std::max_element(p.best_follower_mean_per_leader_arm.begin(),
                                        p.best_follower_mean_per_leader_arm.end());
  return p;
}

// Comparator: max over (a, b^1..b^N) of the followers' average mean.
inline OptimalProfile compute_optimal_profile(const MultiFollowerInstance& inst) {
  OptimalProfile p;
  p.kind = InstanceKind::kMultiFollower;
  p.leader_arms = inst.leader_arms();
  p.best_follower_mean_per_leader_arm.assign(p.leader_arms, 0.0);
  const double n = static_cast<double>(inst.num_followers());
  for (std::size_t a = 0; a < p.leader_arms; ++a) {
    for (std::size_t i = 0; i < inst.num_followers(); ++i) {
      const auto& m = inst.means(i);
      const std::size_t B = inst.follower_arms(i);
      p.best_follower_mean_per_leader_arm[a] +=
          *std::max_element(m.begin() + a * B, m.begin() + (a + 1) * B) / n;
    }
  }
  p.best_joint_mean = *std::max_element(p.best_follower_mean_per_leader_arm.begin(),
                                        p.best_follower_mean_per_leader_arm.end());
  return p;
}

inline OptimalProfile compute_optimal_profile(const DeepBanditInstance& inst) {
  OptimalProfile p;
  p.kind = InstanceKind::kDeep;
  p.leader_arms = inst.arms_per_layer();
  p.follower_arms = inst.num_joint_arms();
  const std::size_t block = inst.num_joint_arms() / p.leader_arms;
  const auto means = inst.means();
  p.best_follower_mean_per_leader_arm.resize(p.leader_arms);
  for (std::size_t a = 0; a < p.leader_arms; ++a) {
    const auto sub = means.subspan(a * block, block);
    p.best_follower_mean_per_leader_arm[a] = *std::max_element(sub.begin(), sub.end());
  }
  p.best_joint_mean = *std::max_element(means.begin(), means.end());
  return p;
}

// Backward induction over the joint action space.
inline OptimalProfile compute_optimal_profile(const MdpInstance& inst) {
  const std::size_t S = inst.states(), A = inst.leader_actions(), B = inst.follower_actions(),
                    H = inst.horizon();
  OptimalProfile p;
  p.kind = InstanceKind::kMdp;
  p.leader_arms = A;
  p.follower_arms = B;
  p.states = S;
  p.horizon = H;
  p.optimal_values.assign((H + 1) * S, 0.0);
  p.optimal_q.assign(H * S * A * B, 0.0);
  for (std::size_t h = H; h-- > 0;) {
    const double* next = &p.optimal_values[(h + 1) * S];
    for (std::size_t s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t b = 0; b < B; ++b) {
          const auto dist = inst.next_state_distribution(s, a, b);
          double q = inst.reward(s, a, b);
          for (std::size_t sp = 0; sp < S; ++sp) q += dist[sp] * next[sp];
          p.optimal_q[((h * S + s) * A + a) * B + b] = q;
          best = std::max(best, q);
        }
      }
      p.optimal_values[h * S + s] = best;
    }
  }
  p.best_joint_mean = p.optimal_values[inst.initial_state()];
  p.best_follower_mean_per_leader_arm.assign(A, 0.0);
  for (std::size_t a = 0; a < A; ++a) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < B; ++b) best = std::max(best, p.q(0, inst.initial_state(), a, b));
    p.best_follower_mean_per_leader_arm[a] = best;
  }
  return p;
}

// Deterministic Markov policies for the two MDP agents.
// leader[h * S + s] is the leader's action; follower[(h * S + s) * A + a] the
// follower's response to leader action a.
struct JointPolicy {
  std::vector<std::size_t> leader;
  std::vector<std::size_t> follower;
};

// Exact value table (H+1) x S of a joint policy by backward induction.
inline std::vector<double> evaluate_policy(const MdpInstance& inst, const JointPolicy& pi) {
  const std::size_t S = inst.states(), A = inst.leader_actions(), H = inst.horizon();
  if (pi.leader.size() != H * S || pi.follower.size() != H * S * A) {
    throw ContractError("policy shape does not match the MDP");
  }
  std::vector<double> v((H + 1) * S, 0.0);
  for (std::size_t h = H; h-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      const std::size_t a = pi.leader[h * S + s];
      const std::size_t b = pi.follower[(h * S + s) * A + a];
      const auto dist = inst.next_state_distribution(s, a, b);
      double q = inst.reward(s, a, b);
      for (std::size_t sp = 0; sp < S; ++sp) q += dist[sp] * v[(h + 1) * S + sp];
      v[h * S + s] = q;
    }
  }
  return v;
}

namespace detail {
inline void check_profile(const OptimalProfile& p, InstanceKind kind, std::size_t A, std::size_t B) {
  if (p.kind != kind || p.leader_arms != A || p.follower_arms != B) {
    throw ContractError("optimal profile was computed for a different instance");
  }
}
}  // namespace detail

inline double instantaneous_regret(const OptimalProfile& p, const BanditInstance& inst, std::size_t a,
                                   std::size_t b) {
  detail::check_profile(p, InstanceKind::kBandit, inst.leader_arms(), inst.follower_arms());
  return p.best_joint_mean - inst.mean(a, b);
}

inline double instantaneous_regret(const OptimalProfile& p, const MultiFollowerInstance& inst,
                                   std::size_t a, std::span<const std::size_t> follower_arms) {
  detail::check_profile(p, InstanceKind::kMultiFollower, inst.leader_arms(), 0);
  if (follower_arms.size() != inst.num_followers()) throw ContractError("one arm per follower expected");
  double avg = 0.0;
  for (std::size_t i = 0; i < follower_arms.size(); ++i) avg += inst.mean(i, a, follower_arms[i]);
  return p.best_joint_mean - avg / static_cast<double>(follower_arms.size());
}

inline double instantaneous_regret(const OptimalProfile& p, const DeepBanditInstance& inst,
                                   std::span<const std::size_t> joint) {
  detail::check_profile(p, InstanceKind::kDeep, inst.arms_per_layer(), inst.num_joint_arms());
  return p.best_joint_mean - inst.mean(joint);
}

// V*_1(s_1) minus the exact value of the policy pair played during the episode.
inline double instantaneous_regret(const OptimalProfile& p, const MdpInstance& inst,
                                   const JointPolicy& pi) {
  detail::check_profile(p, InstanceKind::kMdp, inst.leader_actions(), inst.follower_actions());
  if (p.states != inst.states() || p.horizon != inst.horizon()) {
    throw ContractError("optimal profile was computed for a different instance");
  }
  const auto v = evaluate_policy(inst, pi);
  return p.value(0, inst.initial_state()) - v[inst.initial_state()];
}

}  // namespace hier
