#pragma once

// Batch command-line front end. Exit codes: 0 success, 2 bad flags or config,
// 3 when check-invariants finds violations above the configured fraction.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hier/harness.hpp"
#include "hier/io.hpp"

namespace hier::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitViolations = 3;

// "a..b" (inclusive) or a comma-separated mix of integers and ranges.
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  auto to_u64 = [](const std::string& s) -> std::uint64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw ConfigError("bad seed '" + s + "'", "seeds");
    }
    return std::stoull(s);
  };
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(to_u64(part));
      continue;
    }
    const auto lo = to_u64(part.substr(0, dots)), hi = to_u64(part.substr(dots + 2));
    if (lo > hi) throw ConfigError("seed range '" + part + "' is empty", "seeds");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ConfigError("seed list is empty", "seeds");
  return seeds;
}

struct Options {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out;
  std::string seeds = "1";
  std::size_t jobs = 1;
  bool checkpoints_only = false;
};

namespace detail {

inline Instance load_instance(const json& cfg, const std::filesystem::path& base_dir) {
  if (!cfg.contains("instance")) {
    if (cfg.contains("kind") || cfg.contains("generate")) return instance_from_json(cfg);
    throw ConfigError("missing required key 'instance'", "instance");
  }
  const json& ref = cfg.at("instance");
  if (ref.is_string()) {
    std::filesystem::path p = ref.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    return instance_from_json(read_json_file(p));
  }
  return instance_from_json(ref);
}

inline Algorithm default_algorithm(const std::string& command, InstanceKind kind) {
  if (command == "run-bandit") return Algorithm::kHierBandit;
  if (command == "run-multi") return Algorithm::kMultiFollower;
  if (command == "run-deep") return Algorithm::kDeep;
  if (command == "run-mdp" || command == "check-invariants") return Algorithm::kHierMdp;
  if (command == "run-baseline") return kind == InstanceKind::kMdp ? Algorithm::kCiMdp : Algorithm::kCiBandit;
  throw ConfigError("unknown command '" + command + "'");
}

inline void check_command(const std::string& command, InstanceKind kind, Algorithm alg) {
  auto fail = [&] {
    throw ConfigError(command + " cannot run algorithm " + to_string(alg) + " on a " + to_string(kind) +
                          " instance",
                      "algorithm");
  };
  if (command == "run-bandit" && (kind != InstanceKind::kBandit || alg != Algorithm::kHierBandit)) fail();
  if (command == "run-multi" && (kind != InstanceKind::kMultiFollower || alg != Algorithm::kMultiFollower)) fail();
  if (command == "run-deep" && (kind != InstanceKind::kDeep || alg != Algorithm::kDeep)) fail();
  if (command == "run-mdp" && (kind != InstanceKind::kMdp || alg != Algorithm::kHierMdp)) fail();
  if (command == "check-invariants" &&
      (kind != InstanceKind::kMdp || (alg != Algorithm::kHierMdp && alg != Algorithm::kCiMdp)))
    fail();
  if (command == "run-baseline" && alg != Algorithm::kCiBandit && alg != Algorithm::kCiMdp) fail();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

struct CellResult {
  Summary summary;
  bool violations_exceeded = false;
};

// Runs one configuration over all seeds and writes its artifacts into `out`.
inline CellResult run_cell(const std::string& command, const json& cfg_json,
                           const std::filesystem::path& base_dir, const std::filesystem::path& out,
                           std::span<const std::uint64_t> seeds, std::size_t jobs, bool checkpoints_only,
                           std::ostream& log) {
  const Instance inst = load_instance(cfg_json, base_dir);
  const InstanceKind kind = kind_of(inst);
  RunConfig cfg = run_config_from_json(cfg_json, default_algorithm(command, kind));
  check_command(command, kind, cfg.algorithm);
  if (command == "check-invariants") cfg.check_invariants = true;
  const bool only_checkpoints = checkpoints_only || ::hier::detail::get_or<bool>(cfg_json, "checkpoints_only", false);

  const auto traces = run_seeds(inst, cfg, seeds, jobs);
  std::filesystem::create_directories(out);
  for (const auto& tr : traces) {
    std::ostringstream csv;
    write_trace_csv(csv, tr, only_checkpoints);
    write_text(out / ("trace_seed_" + std::to_string(tr.seed) + ".csv"), csv.str());
    if (!tr.snapshots.empty()) {
      write_text(out / ("snapshots_seed_" + std::to_string(tr.seed) + ".json"),
                 snapshots_to_json(tr, std::get<MdpInstance>(inst)).dump(1) + "\n");
    }
  }
  CellResult res;
  res.summary = aggregate(traces);
  json echo = run_config_to_json(cfg);
  echo["instance"] = instance_to_json(inst);
  echo["seeds"] = std::vector<std::uint64_t>(seeds.begin(), seeds.end());
  json summary = summary_to_json(res.summary, echo);

  if (cfg.check_invariants) {
    std::size_t opt = 0, dom = 0, opt_n = 0, dom_n = 0, mono = 0;
    for (const auto& tr : traces) {
      opt += tr.total_optimism_violations();
      dom += tr.total_dominance_violations();
      opt_n += tr.optimism_checked;
      dom_n += tr.dominance_checked;
      mono += tr.monotonicity_violations;
    }
    const double threshold = ::hier::detail::get_or<double>(cfg_json, "max_violation_fraction", 0.0);
    const double opt_frac = opt_n ? static_cast<double>(opt) / static_cast<double>(opt_n) : 0.0;
    const double dom_frac = dom_n ? static_cast<double>(dom) / static_cast<double>(dom_n) : 0.0;
    summary["invariants"] = {{"optimism_violations", opt},     {"optimism_checked", opt_n},
                             {"optimism_fraction", opt_frac},  {"dominance_violations", dom},
                             {"dominance_checked", dom_n},     {"dominance_fraction", dom_frac},
                             {"monotonicity_violations", mono}, {"max_violation_fraction", threshold}};
    res.violations_exceeded = opt_frac > threshold || dom_frac > threshold || mono > 0;
    log << "invariants: optimism " << opt << "/" << opt_n << ", dominance " << dom << "/" << dom_n
        << ", monotonicity " << mono << (res.violations_exceeded ? " -> FAIL" : " -> ok") << '\n';
  }
  write_text(out / "summary.json", summary.dump(2) + "\n");
  return res;
}

// Sets a dotted path such as "constants.c" inside a JSON object.
inline void set_path(json& j, const std::string& path, const json& value) {
  json* cur = &j;
  std::stringstream ss(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(ss, key, '.')) keys.push_back(key);
  if (keys.empty()) throw ConfigError("empty grid parameter name", "grid");
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    if (!cur->contains(keys[i]) || !(*cur)[keys[i]].is_object()) (*cur)[keys[i]] = json::object();
    cur = &(*cur)[keys[i]];
  }
  (*cur)[keys.back()] = value;
}

inline int run_sweep(const json& sweep_cfg, const Options& opt, std::span<const std::uint64_t> seeds,
                     std::ostream& log) {
  const auto command = ::hier::detail::need_as<std::string>(sweep_cfg, "command");
  if (command == "sweep") throw ConfigError("a sweep cannot nest another sweep", "command");
  const json& base = ::hier::detail::need(sweep_cfg, "base");
  const json& grid = ::hier::detail::need(sweep_cfg, "grid");
  if (!grid.is_object() || grid.empty()) throw ConfigError("grid must list at least one parameter", "grid");
  std::vector<std::pair<std::string, std::vector<json>>> dims;
  for (auto it = grid.begin(); it != grid.end(); ++it) {
    if (!it.value().is_array() || it.value().empty()) {
      throw ConfigError("grid dimension '" + it.key() + "' has no values", "grid");
    }
    dims.emplace_back(it.key(), std::vector<json>(it.value().begin(), it.value().end()));
  }
  std::size_t cells = 1;
  for (const auto& d : dims) cells *= d.second.size();

  json index;
  index["command"] = command;
  index["seeds"] = std::vector<std::uint64_t>(seeds.begin(), seeds.end());
  index["cells"] = json::array();
  int code = kExitOk;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    json cfg = base;
    json params = json::object();
    std::size_t rem = cell;
    for (std::size_t k = dims.size(); k-- > 0;) {
      const auto& [name, values] = dims[k];
      const json& v = values[rem % values.size()];
      rem /= values.size();
      set_path(cfg, name, v);
      params[name] = v;
    }
    std::ostringstream dir;
    dir << "cell_" << std::setw(4) << std::setfill('0') << cell;
    const auto res = run_cell(command, cfg, opt.config.parent_path(), opt.out / dir.str(), seeds, opt.jobs,
                              opt.checkpoints_only, log);
    if (res.violations_exceeded) code = kExitViolations;
    index["cells"].push_back({{"dir", dir.str()},
                              {"params", params},
                              {"exponent", res.summary.exponent ? json(*res.summary.exponent) : json(nullptr)}});
  }
  std::filesystem::create_directories(opt.out);
  write_text(opt.out / "index.json", index.dump(2) + "\n");
  return code;
}

}  // namespace detail

inline int execute(const Options& opt, std::ostream& log) {
  const auto seeds = parse_seeds(opt.seeds);
  const json cfg = read_json_file(opt.config);
  if (opt.command == "sweep") return detail::run_sweep(cfg, opt, seeds, log);
  const auto res = detail::run_cell(opt.command, cfg, opt.config.parent_path(), opt.out, seeds, opt.jobs,
                                    opt.checkpoints_only, log);
  return res.violations_exceeded ? kExitViolations : kExitOk;
}

inline int main(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
  CLI::App app{"Decentralized hierarchical bandit and MDP learners: batch runs and checks"};
  app.require_subcommand(1, 1);
  Options opt;
  const char* commands[][2] = {
      {"run-bandit", "two-agent hierarchical bandit"},
      {"run-mdp", "two-agent hierarchical episodic MDP"},
      {"run-multi", "leader with several followers"},
      {"run-deep", "deep hierarchy of D agents"},
      {"run-baseline", "centralized joint-action baseline"},
      {"sweep", "Cartesian parameter grid over another command"},
      {"check-invariants", "MDP run with optimism/dominance/monotonicity checks"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON config file")->required();
    sub->add_option("--out", opt.out, "output directory")->required();
    sub->add_option("--seeds", opt.seeds, "seed list, e.g. 1..20 or 1,4,7")->capture_default_str();
    sub->add_option("--jobs", opt.jobs, "concurrent runs")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_flag("--checkpoints-only", opt.checkpoints_only, "write only checkpoint rows to trace CSVs");
    sub->callback([&opt, sub] { opt.command = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out_msg, err_msg;
    const int code = app.exit(e, out_msg, err_msg);
    log << out_msg.str();
    err << err_msg.str();
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    return execute(opt, log);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const ContractError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const std::out_of_range& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
  }
  return kExitConfig;
}

}  // namespace hier::cli
