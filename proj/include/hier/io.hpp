#pragma once

// JSON instance/config documents and the CSV/JSON run artifacts.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hier/env.hpp"
#include "hier/error.hpp"
#include "hier/generators.hpp"
#include "hier/harness.hpp"

namespace hier {

using json = nlohmann::json;

namespace detail {

inline const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing required key '") + key + "'", key);
  }
  return j.at(key);
}

template <typename T>
T need_as(const json& j, const char* key) {
  const json& v = need(j, key);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("key '") + key + "' has the wrong type", key);
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("key '") + key + "' has the wrong type", key);
  }
}

// Flattens arbitrarily nested numeric arrays in row-major order.
inline void flatten_into(const json& j, std::vector<double>& out, const char* key) {
  if (j.is_array()) {
    for (const auto& e : j) flatten_into(e, out, key);
  } else if (j.is_number()) {
    out.push_back(j.get<double>());
  } else {
    throw ConfigError(std::string("key '") + key + "' must hold nested numeric arrays", key);
  }
}

inline std::vector<double> flat(const json& j, const char* key) {
  std::vector<double> out;
  flatten_into(need(j, key), out, key);
  return out;
}

inline NoiseKind parse_noise(const json& j) {
  const auto s = get_or<std::string>(j, "noise", "bernoulli");
  if (s == "bernoulli") return NoiseKind::kBernoulli;
  if (s == "uniform" || s == "uniform-bounded") return NoiseKind::kUniformBounded;
  throw ConfigError("unknown noise kind '" + s + "'", "noise");
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

inline json nest(std::span<const double> xs, std::span<const std::size_t> shape) {
  if (shape.size() == 1) return json(std::vector<double>(xs.begin(), xs.end()));
  json arr = json::array();
  const std::size_t stride = xs.size() / shape[0];
  for (std::size_t i = 0; i < shape[0]; ++i) arr.push_back(nest(xs.subspan(i * stride, stride), shape.subspan(1)));
  return arr;
}

}  // namespace detail

// Parses text as JSON; syntax errors become ConfigError carrying the line number.
inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ":" + std::to_string(detail::line_of(text, e.byte)) +
                      ": JSON syntax error: " + e.what());
  }
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path.string());
}

inline Instance generate_instance(const json& g) {
  const auto kind = detail::need_as<std::string>(g, "kind");
  const auto seed = detail::get_or<std::uint64_t>(g, "seed", 0);
  const auto noise = detail::parse_noise(g);
  if (kind == "bandit") {
    return random_gap_bandit(detail::need_as<std::size_t>(g, "A"), detail::need_as<std::size_t>(g, "B"),
                             detail::get_or<double>(g, "min_gap", 0.0), seed, noise);
  }
  if (kind == "multi_follower") {
    return random_multi_follower(detail::need_as<std::size_t>(g, "A"),
                                 detail::need_as<std::vector<std::size_t>>(g, "B_list"), seed, noise);
  }
  if (kind == "deep") {
    return random_deep(detail::need_as<std::size_t>(g, "D"), detail::need_as<std::size_t>(g, "A"), seed,
                       noise);
  }
  if (kind == "mdp") {
    return random_mdp(detail::need_as<std::size_t>(g, "S"), detail::need_as<std::size_t>(g, "A"),
                      detail::need_as<std::size_t>(g, "B"), detail::need_as<std::size_t>(g, "H"), seed,
                      noise);
  }
  throw ConfigError("unknown instance kind '" + kind + "'", "kind");
}

inline Instance instance_from_json(const json& j) {
  if (j.is_object() && j.contains("generate")) return generate_instance(j.at("generate"));
  const auto kind = detail::need_as<std::string>(j, "kind");
  const auto noise = detail::parse_noise(j);
  if (kind == "bandit") {
    return BanditInstance(detail::need_as<std::size_t>(j, "A"), detail::need_as<std::size_t>(j, "B"),
                          detail::flat(j, "means"), noise);
  }
  if (kind == "multi_follower") {
    const auto A = detail::need_as<std::size_t>(j, "A");
    const auto bs = detail::need_as<std::vector<std::size_t>>(j, "B_list");
    const json& m = detail::need(j, "means");
    if (!m.is_array() || m.size() != bs.size()) {
      throw ConfigError("means must hold one matrix per follower", "means");
    }
    std::vector<std::vector<double>> means;
    for (const auto& mi : m) {
      std::vector<double> row;
      detail::flatten_into(mi, row, "means");
      means.push_back(std::move(row));
    }
    return MultiFollowerInstance(A, bs, std::move(means), noise);
  }
  if (kind == "deep") {
    return DeepBanditInstance(detail::need_as<std::size_t>(j, "D"), detail::need_as<std::size_t>(j, "A"),
                              detail::flat(j, "means"), noise);
  }
  if (kind == "mdp") {
    return MdpInstance(detail::need_as<std::size_t>(j, "S"), detail::need_as<std::size_t>(j, "A"),
                       detail::need_as<std::size_t>(j, "B"), detail::need_as<std::size_t>(j, "H"),
                       detail::flat(j, "rewards"), detail::flat(j, "transitions"),
                       detail::get_or<std::size_t>(j, "initial_state", 0), noise);
  }
  throw ConfigError("unknown instance kind '" + kind + "'", "kind");
}

inline json instance_to_json(const Instance& inst) {
  return std::visit(
      [](const auto& i) -> json {
        using T = std::decay_t<decltype(i)>;
        json j;
        j["noise"] = to_string(i.noise());
        if constexpr (std::is_same_v<T, BanditInstance>) {
          const std::size_t shape[] = {i.leader_arms(), i.follower_arms()};
          j["kind"] = "bandit";
          j["A"] = i.leader_arms();
          j["B"] = i.follower_arms();
          j["means"] = detail::nest(i.means(), shape);
        } else if constexpr (std::is_same_v<T, MultiFollowerInstance>) {
          j["kind"] = "multi_follower";
          j["A"] = i.leader_arms();
          j["B_list"] = std::vector<std::size_t>(i.follower_arm_counts().begin(), i.follower_arm_counts().end());
          j["means"] = json::array();
          for (std::size_t f = 0; f < i.num_followers(); ++f) {
            const std::size_t shape[] = {i.leader_arms(), i.follower_arms(f)};
            j["means"].push_back(detail::nest(i.means(f), shape));
          }
        } else if constexpr (std::is_same_v<T, DeepBanditInstance>) {
          std::vector<std::size_t> shape(i.depth(), i.arms_per_layer());
          j["kind"] = "deep";
          j["D"] = i.depth();
          j["A"] = i.arms_per_layer();
          j["means"] = detail::nest(i.means(), shape);
        } else {
          const std::size_t rshape[] = {i.states(), i.leader_actions(), i.follower_actions()};
          const std::size_t pshape[] = {i.states(), i.leader_actions(), i.follower_actions(), i.states()};
          j["kind"] = "mdp";
          j["S"] = i.states();
          j["A"] = i.leader_actions();
          j["B"] = i.follower_actions();
          j["H"] = i.horizon();
          j["initial_state"] = i.initial_state();
          j["rewards"] = detail::nest(i.rewards(), rshape);
          j["transitions"] = detail::nest(i.transitions(), pshape);
        }
        return j;
      },
      inst);
}

// Reads the run-level fields of a config document (the instance is separate).
inline RunConfig run_config_from_json(const json& j, Algorithm fallback) {
  RunConfig cfg;
  cfg.algorithm = fallback;
  if (j.contains("algorithm")) {
    const auto name = detail::need_as<std::string>(j, "algorithm");
    const auto alg = parse_algorithm(name);
    if (!alg) throw ConfigError("unknown algorithm '" + name + "'", "algorithm");
    cfg.algorithm = *alg;
  }
  cfg.horizon = detail::need_as<std::size_t>(j, "T");
  if (cfg.horizon < 1) throw ConfigError("T must be >= 1", "T");
  if (j.contains("constants")) {
    const json& c = j.at("constants");
    cfg.constants.c = detail::get_or<double>(c, "c", cfg.constants.c);
    cfg.constants.c_prime = detail::get_or<double>(c, "c_prime", cfg.constants.c_prime);
    cfg.constants.kappa = detail::get_or<double>(c, "kappa", cfg.constants.kappa);
    cfg.constants.delta = detail::get_or<double>(c, "delta", cfg.constants.delta);
    cfg.constants.c_last = detail::get_or<double>(c, "C_D", cfg.constants.c_last);
  }
  cfg.check_invariants = detail::get_or<bool>(j, "check_invariants", false);
  cfg.snapshot_every = detail::get_or<std::size_t>(j, "snapshot_every", 0);
  cfg.validate();
  return cfg;
}

inline json run_config_to_json(const RunConfig& cfg) {
  return json{{"algorithm", to_string(cfg.algorithm)},
              {"T", cfg.horizon},
              {"constants",
               {{"c", cfg.constants.c},
                {"c_prime", cfg.constants.c_prime},
                {"kappa", cfg.constants.kappa},
                {"delta", cfg.constants.delta},
                {"C_D", cfg.constants.c_last}}},
              {"check_invariants", cfg.check_invariants},
              {"snapshot_every", cfg.snapshot_every}};
}

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// One row per step; with checkpoints_only, only rows at the checkpoint schedule.
inline void write_trace_csv(std::ostream& out, const RegretTrace& tr, bool checkpoints_only = false) {
  out << "t,instantaneous_regret,cumulative_regret";
  if (tr.has_invariants) out << ",optimism_violations,dominance_violations";
  out << '\n';
  auto row = [&](std::size_t t) {
    out << t << ',' << format_double(tr.instantaneous[t - 1]) << ',' << format_double(tr.cumulative[t - 1]);
    if (tr.has_invariants) out << ',' << tr.optimism_violations[t - 1] << ',' << tr.dominance_violations[t - 1];
    out << '\n';
  };
  if (checkpoints_only) {
    for (auto t : checkpoint_schedule(tr.size())) row(t);
  } else {
    for (std::size_t t = 1; t <= tr.size(); ++t) row(t);
  }
}

inline json summary_to_json(const Summary& s, const json& config) {
  json j;
  j["config"] = config;
  j["checkpoints"] = json::array();
  for (const auto& cp : s.checkpoints) {
    j["checkpoints"].push_back(
        {{"t", cp.t}, {"mean", cp.mean}, {"median", cp.median}, {"q25", cp.q25}, {"q75", cp.q75}});
  }
  j["exponent"] = s.exponent ? json(*s.exponent) : json(nullptr);
  j["per_seed_final"] = json::array();
  for (const auto& [seed, fin] : s.per_seed_final) j["per_seed_final"].push_back({{"seed", seed}, {"final", fin}});
  return j;
}

inline json snapshots_to_json(const RegretTrace& tr, const MdpInstance& inst) {
  json arr = json::array();
  for (const auto& snap : tr.snapshots) {
    for (std::size_t h = 0; h < inst.horizon(); ++h) {
      json e;
      e["episode"] = snap.episode;
      e["h"] = h;
      const std::size_t l = inst.states() * inst.leader_actions();
      const std::size_t f = l * inst.follower_actions();
      if (!snap.leader_q.empty()) {
        e["leader_q"] = std::vector<double>(snap.leader_q.begin() + static_cast<std::ptrdiff_t>(h * l),
                                            snap.leader_q.begin() + static_cast<std::ptrdiff_t>((h + 1) * l));
      }
      e["follower_q"] = std::vector<double>(snap.follower_q.begin() + static_cast<std::ptrdiff_t>(h * f),
                                            snap.follower_q.begin() + static_cast<std::ptrdiff_t>((h + 1) * f));
      arr.push_back(std::move(e));
    }
  }
  return arr;
}

}  // namespace hier
