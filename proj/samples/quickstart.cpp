// Runs the hierarchical bandit and its centralized baseline on one random
// instance and prints cumulative regret at a few checkpoints.

#include <cstdio>

#include "hier/generators.hpp"
#include "hier/harness.hpp"

int main() {
  const auto inst = hier::random_gap_bandit(4, 3, 0.1, /*seed=*/7);
  hier::RunConfig cfg;
  cfg.horizon = 20000;
  cfg.seed = 1;

  cfg.algorithm = hier::Algorithm::kHierBandit;
  const auto hier_trace = hier::run_bandit(inst, cfg);
  cfg.algorithm = hier::Algorithm::kCiBandit;
  const auto ci_trace = hier::run_ci_bandit(inst, cfg);

  std::printf("%8s %14s %14s\n", "t", "hierarchical", "centralized");
  for (auto t : hier::checkpoint_schedule(cfg.horizon)) {
    if (t < 64) continue;
    std::printf("%8zu %14.2f %14.2f\n", t, hier_trace.cumulative[t - 1], ci_trace.cumulative[t - 1]);
  }
}
