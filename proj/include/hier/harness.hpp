#pragma once

// Run loops wiring environments to agents, regret traces, and cross-seed
// aggregation.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "hier/bandit_agents.hpp"
#include "hier/baselines.hpp"
#include "hier/env.hpp"
#include "hier/error.hpp"
#include "hier/mdp_agents.hpp"
#include "hier/rng.hpp"

namespace hier {

using Instance = std::variant<BanditInstance, MultiFollowerInstance, DeepBanditInstance, MdpInstance>;

inline InstanceKind kind_of(const Instance& inst) {
  return std::visit(
      [](const auto& i) {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, BanditInstance>) return InstanceKind::kBandit;
        else if constexpr (std::is_same_v<T, MultiFollowerInstance>) return InstanceKind::kMultiFollower;
        else if constexpr (std::is_same_v<T, DeepBanditInstance>) return InstanceKind::kDeep;
        else return InstanceKind::kMdp;
      },
      inst);
}

enum class Algorithm { kHierBandit, kMultiFollower, kDeep, kHierMdp, kCiBandit, kCiMdp };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kHierBandit: return "hier-bandit";
    case Algorithm::kMultiFollower: return "multi-follower";
    case Algorithm::kDeep: return "deep";
    case Algorithm::kHierMdp: return "hier-mdp";
    case Algorithm::kCiBandit: return "ci-bandit";
    case Algorithm::kCiMdp: return "ci-mdp";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& s) {
  for (auto a : {Algorithm::kHierBandit, Algorithm::kMultiFollower, Algorithm::kDeep,
                 Algorithm::kHierMdp, Algorithm::kCiBandit, Algorithm::kCiMdp}) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

struct Constants {
  double c = 1.0;
  double c_prime = 1.0;
  double kappa = 1.0;
  double delta = 0.01;
  double c_last = 2.0;  // C_D for the deep hierarchy
};

struct RunConfig {
  Algorithm algorithm = Algorithm::kHierBandit;
  std::size_t horizon = 1;  // rounds for bandits, episodes for MDPs
  std::uint64_t seed = 0;
  Constants constants;
  bool check_invariants = false;
  std::size_t snapshot_every = 0;  // MDP table snapshots every k episodes; 0 disables
  bool record_actions = false;
  std::vector<std::size_t> count_checkpoints;  // rounds at which leader pull counts are recorded

  void validate() const {
    if (!(constants.delta > 0.0 && constants.delta < 1.0)) {
      throw ConfigError("delta must lie in (0,1)", "delta");
    }
  }
};

// Tables at the end of one episode, flattened in their natural row-major order.
struct TableSnapshot {
  std::size_t episode = 0;
  std::vector<double> leader_q;
  std::vector<double> follower_q;
};

struct RegretTrace {
  Algorithm algorithm = Algorithm::kHierBandit;
  std::uint64_t seed = 0;
  std::vector<double> instantaneous;
  std::vector<double> cumulative;

  // Filled when invariant checking is on (MDP runs). Per-episode counts.
  bool has_invariants = false;
  std::vector<std::size_t> optimism_violations;
  std::vector<std::size_t> dominance_violations;
  std::size_t optimism_checked = 0;
  std::size_t dominance_checked = 0;
  std::size_t monotonicity_violations = 0;

  // Joint action per step (episode-major for MDPs) when record_actions is set.
  std::size_t action_stride = 0;
  std::vector<std::size_t> actions;

  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> leader_counts;
  std::vector<TableSnapshot> snapshots;

  std::size_t size() const noexcept { return instantaneous.size(); }
  double final_regret() const { return cumulative.empty() ? 0.0 : cumulative.back(); }

  std::size_t total_optimism_violations() const {
    std::size_t n = 0;
    for (auto v : optimism_violations) n += v;
    return n;
  }
  std::size_t total_dominance_violations() const {
    std::size_t n = 0;
    for (auto v : dominance_violations) n += v;
    return n;
  }

  void push(double r) {
    instantaneous.push_back(r);
    cumulative.push_back((cumulative.empty() ? 0.0 : cumulative.back()) + r);
  }
};

// Float slack for the optimism and dominance comparisons. Monotonicity of Q2
// is compared exactly.
inline constexpr double kInvariantSlack = 1e-12;

namespace detail {

inline RegretTrace start_trace(const RunConfig& cfg) {
  RegretTrace tr;
  tr.algorithm = cfg.algorithm;
  tr.seed = cfg.seed;
  tr.instantaneous.reserve(cfg.horizon);
  tr.cumulative.reserve(cfg.horizon);
  return tr;
}

inline void maybe_record_counts(RegretTrace& tr, const RunConfig& cfg, std::size_t t,
                                std::span<const std::size_t> counts) {
  if (std::find(cfg.count_checkpoints.begin(), cfg.count_checkpoints.end(), t) !=
      cfg.count_checkpoints.end()) {
    tr.leader_counts.emplace_back(t, std::vector<std::size_t>(counts.begin(), counts.end()));
  }
}

inline void expect_algorithm(const RunConfig& cfg, std::initializer_list<Algorithm> allowed,
                             const char* instance_kind) {
  for (auto a : allowed) {
    if (cfg.algorithm == a) return;
  }
  throw ConfigError(std::string("algorithm ") + to_string(cfg.algorithm) +
                        " cannot run on a " + instance_kind + " instance",
                    "algorithm");
}

}  // namespace detail

// Leader selects, follower sees a_t and selects, one shared reward sample
// updates both.
inline RegretTrace run_bandit(const BanditInstance& inst, const RunConfig& cfg) {
  detail::expect_algorithm(cfg, {Algorithm::kHierBandit}, "bandit");
  cfg.validate();
  RegretTrace tr = detail::start_trace(cfg);
  if (cfg.horizon == 0) return tr;
  const auto profile = compute_optimal_profile(inst);
  LeaderBanditState leader(inst.leader_arms(),
                           LeaderParams{cfg.constants.kappa, cfg.constants.c, cfg.horizon,
                                        cfg.constants.delta, static_cast<double>(inst.follower_arms())});
  FollowerBank<Ucb1> bank(inst.leader_arms(),
                          Ucb1(inst.follower_arms(), {cfg.horizon, cfg.constants.delta}));
  RngStreams rng(cfg.seed);
  if (cfg.record_actions) tr.action_stride = 2;
  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    const std::size_t a = leader_select_arm(leader);
    const std::size_t b = follower_select_arm(bank, a);
    const double r = sample_bandit_reward(inst, a, b, rng.rewards);
    leader_observe(leader, a, r);
    follower_observe(bank, a, b, r);
    tr.push(instantaneous_regret(profile, inst, a, b));
    if (cfg.record_actions) tr.actions.insert(tr.actions.end(), {a, b});
    detail::maybe_record_counts(tr, cfg, t + 1, leader.stats().counts());
  }
  return tr;
}

inline RegretTrace run_ci_bandit(const BanditInstance& inst, const RunConfig& cfg) {
  detail::expect_algorithm(cfg, {Algorithm::kCiBandit}, "bandit");
  cfg.validate();
  RegretTrace tr = detail::start_trace(cfg);
  if (cfg.horizon == 0) return tr;
  const auto profile = compute_optimal_profile(inst);
  JointArmState joint(inst.leader_arms(), inst.follower_arms(), {cfg.horizon, cfg.constants.delta});
  RngStreams rng(cfg.seed);
  if (cfg.record_actions) tr.action_stride = 2;
  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    const auto [a, b] = ci_bandit_select(joint);
    const double r = sample_bandit_reward(inst, a, b, rng.rewards);
    joint.observe(a, b, r);
    tr.push(instantaneous_regret(profile, inst, a, b));
    if (cfg.record_actions) tr.actions.insert(tr.actions.end(), {a, b});
  }
  return tr;
}

// Followers act in index order, each drawing its own reward; the leader sees
// their average.
inline RegretTrace run_multi(const MultiFollowerInstance& inst, const RunConfig& cfg) {
  detail::expect_algorithm(cfg, {Algorithm::kMultiFollower}, "multi_follower");
  cfg.validate();
  RegretTrace tr = detail::start_trace(cfg);
  if (cfg.horizon == 0) return tr;
  const auto profile = compute_optimal_profile(inst);
  const std::size_t N = inst.num_followers();
  LeaderBanditState leader = make_multi_follower_leader(
      inst.leader_arms(), inst.follower_arm_counts(),
      LeaderParams{cfg.constants.kappa, cfg.constants.c, cfg.horizon, cfg.constants.delta, 1.0});
  std::vector<FollowerBank<Ucb1>> banks;
  banks.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    banks.emplace_back(inst.leader_arms(),
                       Ucb1(inst.follower_arms(i), {cfg.horizon, cfg.constants.delta}));
  }
  RngStreams rng(cfg.seed);
  std::vector<std::size_t> arms(N);
  if (cfg.record_actions) tr.action_stride = N + 1;
  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    const std::size_t a = multi_follower_leader_select(leader);
    double avg = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      arms[i] = follower_select_arm(banks[i], a);
      const double r = sample_reward(inst.noise(), inst.mean(i, a, arms[i]), rng.rewards);
      follower_observe(banks[i], a, arms[i], r);
      avg += r;
    }
    avg /= static_cast<double>(N);
    leader_observe(leader, a, avg);
    tr.push(instantaneous_regret(profile, inst, a, arms));
    if (cfg.record_actions) {
      tr.actions.push_back(a);
      tr.actions.insert(tr.actions.end(), arms.begin(), arms.end());
    }
    detail::maybe_record_counts(tr, cfg, t + 1, leader.stats().counts());
  }
  return tr;
}

inline RegretTrace run_deep(const DeepBanditInstance& inst, const RunConfig& cfg) {
  detail::expect_algorithm(cfg, {Algorithm::kDeep, Algorithm::kCiBandit}, "deep");
  cfg.validate();
  RegretTrace tr = detail::start_trace(cfg);
  if (cfg.horizon == 0) return tr;
  const auto profile = compute_optimal_profile(inst);
  RngStreams rng(cfg.seed);
  if (cfg.record_actions) tr.action_stride = inst.depth();

  if (cfg.algorithm == Algorithm::kCiBandit) {
    // Centralized UCB1 over all A^D joint arms.
    Ucb1 joint(inst.num_joint_arms(), {cfg.horizon, cfg.constants.delta});
    std::vector<std::size_t> arm(inst.depth());
    for (std::size_t t = 0; t < cfg.horizon; ++t) {
      std::size_t flat = joint.select();
      const double r = sample_reward(inst.noise(), inst.means()[flat], rng.rewards);
      joint.observe(flat, r);
      for (std::size_t d = inst.depth(); d-- > 0;) {
        arm[d] = flat % inst.arms_per_layer();
        flat /= inst.arms_per_layer();
      }
      tr.push(instantaneous_regret(profile, inst, arm));
      if (cfg.record_actions) tr.actions.insert(tr.actions.end(), arm.begin(), arm.end());
    }
    return tr;
  }

  DeepTeam team(DeepParams{inst.depth(), inst.arms_per_layer(), cfg.horizon, cfg.constants.delta},
                cfg.constants.c_last);
  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    const auto joint = team.select();
    const double r = sample_reward(inst.noise(), inst.mean(joint), rng.rewards);
    team.observe(joint, r);
    tr.push(instantaneous_regret(profile, inst, joint));
    if (cfg.record_actions) tr.actions.insert(tr.actions.end(), joint.begin(), joint.end());
    detail::maybe_record_counts(tr, cfg, t + 1, team.agent(1).counts());
  }
  return tr;
}

namespace detail {

inline MdpParams mdp_params(const MdpInstance& inst, const RunConfig& cfg) {
  return params_for(inst, std::max<std::size_t>(cfg.horizon, 1), cfg.constants.delta, cfg.constants.c,
                    cfg.constants.c_prime);
}

// Optimism of Q2 against Q* over all (h,s,a,b).
inline std::size_t count_optimism_violations(const FollowerQTables& f, const OptimalProfile& opt) {
  const auto& p = f.params();
  std::size_t bad = 0;
  for (std::size_t h = 0; h < p.horizon; ++h)
    for (std::size_t s = 0; s < p.states; ++s)
      for (std::size_t a = 0; a < p.leader_actions; ++a)
        for (std::size_t b = 0; b < p.follower_actions; ++b)
          if (f.q(h, s, a, b) < opt.q(h, s, a, b) - kInvariantSlack) ++bad;
  return bad;
}

// Q1(h,s,a) >= max_b Q2(h,s,a,b) over all (h,s,a).
inline std::size_t count_dominance_violations(const LeaderQTables& l, const FollowerQTables& f) {
  const auto& p = f.params();
  std::size_t bad = 0;
  for (std::size_t h = 0; h < p.horizon; ++h)
    for (std::size_t s = 0; s < p.states; ++s)
      for (std::size_t a = 0; a < p.leader_actions; ++a) {
        double best = f.q(h, s, a, 0);
        for (std::size_t b = 1; b < p.follower_actions; ++b) best = std::max(best, f.q(h, s, a, b));
        if (l.q(h, s, a) < best - kInvariantSlack) ++bad;
      }
  return bad;
}

inline std::size_t count_increases(std::span<const double> before, std::span<const double> after) {
  std::size_t bad = 0;
  for (std::size_t i = 0; i < before.size(); ++i)
    if (after[i] > before[i]) ++bad;
  return bad;
}

}  // namespace detail

// One episode at a time: reset to the initial state, play H steps with
// in-episode count updates, then both agents update their tables. Regret is
// the exact value gap of the policy pair held at episode start.
inline RegretTrace run_mdp(const MdpInstance& inst, const RunConfig& cfg) {
  detail::expect_algorithm(cfg, {Algorithm::kHierMdp}, "mdp");
  cfg.validate();
  RegretTrace tr = detail::start_trace(cfg);
  if (cfg.horizon == 0) return tr;
  const auto profile = compute_optimal_profile(inst);
  const auto params = detail::mdp_params(inst, cfg);
  LeaderQTables leader(params);
  FollowerQTables follower(params);
  RngStreams rng(cfg.seed);
  const std::size_t H = inst.horizon();
  std::vector<Transition> traj(H);
  std::vector<double> previous_q2;
  tr.has_invariants = cfg.check_invariants;
  if (cfg.record_actions) tr.action_stride = 2;

  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    tr.push(instantaneous_regret(profile, inst, greedy_policies(leader, follower)));
    std::size_t s = inst.initial_state();
    for (std::size_t h = 0; h < H; ++h) {
      const std::size_t a = leader.act(s, h);
      const std::size_t b = follower.act(s, a, h);
      const double r = sample_mdp_reward(inst, s, a, b, rng.rewards);
      const std::size_t next = sample_transition(inst, s, a, b, rng.transitions);
      traj[h] = Transition{s, a, b, r, next};
      leader.record_visit(h, s, a);
      follower.record_visit(h, traj[h]);
      if (cfg.record_actions) tr.actions.insert(tr.actions.end(), {a, b});
      s = next;
    }
    if (cfg.check_invariants) {
      previous_q2.assign(follower.q_table().begin(), follower.q_table().end());
    }
    leader.episode_update(traj);
    follower.episode_update();
    if (cfg.check_invariants) {
      tr.monotonicity_violations += detail::count_increases(previous_q2, follower.q_table());
      tr.optimism_violations.push_back(detail::count_optimism_violations(follower, profile));
      tr.dominance_violations.push_back(detail::count_dominance_violations(leader, follower));
      tr.optimism_checked += H * inst.states() * inst.leader_actions() * inst.follower_actions();
      tr.dominance_checked += H * inst.states() * inst.leader_actions();
    }
    if (cfg.snapshot_every > 0 && (t + 1) % cfg.snapshot_every == 0) {
      tr.snapshots.push_back({t + 1, std::vector<double>(leader.q_table().begin(), leader.q_table().end()),
                              std::vector<double>(follower.q_table().begin(), follower.q_table().end())});
    }
  }
  return tr;
}

inline RegretTrace run_ci_mdp(const MdpInstance& inst, const RunConfig& cfg) {
  detail::expect_algorithm(cfg, {Algorithm::kCiMdp}, "mdp");
  cfg.validate();
  RegretTrace tr = detail::start_trace(cfg);
  if (cfg.horizon == 0) return tr;
  const auto profile = compute_optimal_profile(inst);
  CentralizedMdpAgent agent(detail::mdp_params(inst, cfg));
  RngStreams rng(cfg.seed);
  const std::size_t H = inst.horizon();
  std::vector<double> previous_q2;
  tr.has_invariants = cfg.check_invariants;
  if (cfg.record_actions) tr.action_stride = 2;

  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    tr.push(instantaneous_regret(profile, inst, agent.policy()));
    std::size_t s = inst.initial_state();
    for (std::size_t h = 0; h < H; ++h) {
      const auto [a, b] = agent.act(s, h);
      const double r = sample_mdp_reward(inst, s, a, b, rng.rewards);
      const std::size_t next = sample_transition(inst, s, a, b, rng.transitions);
      agent.record_visit(h, Transition{s, a, b, r, next});
      if (cfg.record_actions) tr.actions.insert(tr.actions.end(), {a, b});
      s = next;
    }
    if (cfg.check_invariants) {
      previous_q2.assign(agent.tables().q_table().begin(), agent.tables().q_table().end());
    }
    agent.episode_update();
    if (cfg.check_invariants) {
      tr.monotonicity_violations += detail::count_increases(previous_q2, agent.tables().q_table());
      tr.optimism_violations.push_back(detail::count_optimism_violations(agent.tables(), profile));
      tr.dominance_violations.push_back(0);
      tr.optimism_checked += H * inst.states() * inst.leader_actions() * inst.follower_actions();
    }
    if (cfg.snapshot_every > 0 && (t + 1) % cfg.snapshot_every == 0) {
      tr.snapshots.push_back({t + 1, {},
                              std::vector<double>(agent.tables().q_table().begin(),
                                                  agent.tables().q_table().end())});
    }
  }
  return tr;
}

// Dispatch on (instance kind, algorithm); mismatches raise ConfigError.
inline RegretTrace run(const Instance& inst, const RunConfig& cfg) {
  return std::visit(
      [&](const auto& i) -> RegretTrace {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, BanditInstance>) {
          return cfg.algorithm == Algorithm::kCiBandit ? run_ci_bandit(i, cfg) : run_bandit(i, cfg);
        } else if constexpr (std::is_same_v<T, MultiFollowerInstance>) {
          return run_multi(i, cfg);
        } else if constexpr (std::is_same_v<T, DeepBanditInstance>) {
          return run_deep(i, cfg);
        } else {
          return cfg.algorithm == Algorithm::kCiMdp ? run_ci_mdp(i, cfg) : run_mdp(i, cfg);
        }
      },
      inst);
}

// Runs one trace per seed, at most `jobs` at a time. Output order follows `seeds`.
inline std::vector<RegretTrace> run_seeds(const Instance& inst, const RunConfig& base,
                                          std::span<const std::uint64_t> seeds, std::size_t jobs = 1) {
  std::vector<RegretTrace> out(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        RunConfig cfg = base;
        cfg.seed = seeds[i];
        out[i] = run(inst, cfg);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(seeds.size(), 1));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

struct Checkpoint {
  std::size_t t = 0;
  double mean = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double iqr() const { return q75 - q25; }
};

struct Summary {
  std::size_t horizon = 0;
  std::vector<Checkpoint> checkpoints;
  std::optional<double> exponent;
  std::vector<std::pair<std::uint64_t, double>> per_seed_final;
  std::vector<double> mean_cumulative;
};

// Powers of two up to T, plus T itself.
inline std::vector<std::size_t> checkpoint_schedule(std::size_t horizon) {
  std::vector<std::size_t> ts;
  for (std::size_t t = 1; t <= horizon; t *= 2) ts.push_back(t);
  if (horizon > 0 && ts.back() != horizon) ts.push_back(horizon);
  return ts;
}

// Linear-interpolated quantile of an unsorted sample.
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw ContractError("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

inline constexpr std::size_t kExponentSamplePoints = 64;

// Least-squares slope of log(curve[t-1]) against log(t) at log-spaced t in
// [t_lo, t_hi]. Points with non-positive values are skipped; nullopt when
// fewer than two usable points remain.
inline std::optional<double> growth_exponent(std::span<const double> curve, std::size_t t_lo,
                                             std::size_t t_hi) {
  t_hi = std::min(t_hi, curve.size());
  t_lo = std::max<std::size_t>(t_lo, 1);
  if (t_lo >= t_hi) return std::nullopt;
  std::vector<std::size_t> ts;
  const double llo = std::log(static_cast<double>(t_lo)), lhi = std::log(static_cast<double>(t_hi));
  for (std::size_t k = 0; k < kExponentSamplePoints; ++k) {
    const double frac = static_cast<double>(k) / static_cast<double>(kExponentSamplePoints - 1);
    auto t = static_cast<std::size_t>(std::llround(std::exp(llo + frac * (lhi - llo))));
    t = std::clamp(t, t_lo, t_hi);
    if (ts.empty() || ts.back() != t) ts.push_back(t);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (auto t : ts) {
    const double y = curve[t - 1];
    if (!(y > 0.0)) continue;
    const double lx = std::log(static_cast<double>(t)), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double nd = static_cast<double>(n);
  const double denom = nd * sxx - sx * sx;
  if (denom <= 0.0) return std::nullopt;
  return (nd * sxy - sx * sy) / denom;
}

// Window covering the last half-decade of [1, T].
inline std::pair<std::size_t, std::size_t> default_exponent_window(std::size_t horizon) {
  const auto lo = static_cast<std::size_t>(std::ceil(static_cast<double>(horizon) / std::sqrt(10.0)));
  return {std::max<std::size_t>(lo, 1), horizon};
}

inline std::vector<double> mean_cumulative(std::span<const RegretTrace> traces) {
  if (traces.empty()) throw ContractError("cannot aggregate zero traces");
  const std::size_t T = traces.front().size();
  std::vector<double> mean(T, 0.0);
  for (const auto& tr : traces) {
    if (tr.size() != T) throw ContractError("traces must share the same horizon");
    for (std::size_t t = 0; t < T; ++t) mean[t] += tr.cumulative[t];
  }
  for (auto& m : mean) m /= static_cast<double>(traces.size());
  return mean;
}

inline Summary aggregate(std::span<const RegretTrace> traces) {
  Summary s;
  s.mean_cumulative = mean_cumulative(traces);
  s.horizon = s.mean_cumulative.size();
  for (auto t : checkpoint_schedule(s.horizon)) {
    std::vector<double> vals;
    vals.reserve(traces.size());
    for (const auto& tr : traces) vals.push_back(tr.cumulative[t - 1]);
    Checkpoint cp;
    cp.t = t;
    cp.mean = s.mean_cumulative[t - 1];
    cp.median = quantile(vals, 0.5);
    cp.q25 = quantile(vals, 0.25);
    cp.q75 = quantile(vals, 0.75);
    s.checkpoints.push_back(cp);
  }
  const auto [lo, hi] = default_exponent_window(s.horizon);
  s.exponent = growth_exponent(s.mean_cumulative, lo, hi);
  for (const auto& tr : traces) s.per_seed_final.emplace_back(tr.seed, tr.final_regret());
  return s;
}

}  // namespace hier
