#pragma once

// Random instance families used by the acceptance suite and the CLI's
// "generate" instance source. All draws come from the generator substream.

#include <cmath>
#include <cstdint>
#include <vector>

#include "hier/env.hpp"
#include "hier/rng.hpp"

namespace hier {

// Means uniform on [0,1], resampled until the best leader arm beats every other
// leader arm's best by >= min_gap and, inside every row, the best follower arm
// beats every other arm of that row by >= min_gap.
inline BanditInstance random_gap_bandit(std::size_t A, std::size_t B, double min_gap, std::uint64_t seed,
                                        NoiseKind noise = NoiseKind::kBernoulli) {
  require(min_gap >= 0.0 && min_gap * static_cast<double>(std::max(A, B) - 1) < 1.0,
          "min_gap is infeasible for this many arms");
  Rng rng = make_stream(seed, Stream::kGenerator);
  std::vector<double> m(A * B);
  for (;;) {
    for (auto& x : m) x = rng.uniform();
    bool ok = true;
    std::vector<double> row_best(A);
    for (std::size_t a = 0; a < A && ok; ++a) {
      double best = -1.0, second = -1.0;
      for (std::size_t b = 0; b < B; ++b) {
        const double x = m[a * B + b];
        if (x > best) {
          second = best;
          best = x;
        } else if (x > second) {
          second = x;
        }
      }
      row_best[a] = best;
      if (B > 1 && best - second < min_gap) ok = false;
    }
    if (!ok) continue;
    double best = -1.0, second = -1.0;
    for (double x : row_best) {
      if (x > best) {
        second = best;
        best = x;
      } else if (x > second) {
        second = x;
      }
    }
    if (A > 1 && best - second < min_gap) continue;
    return BanditInstance(A, B, m, noise);
  }
}

inline MultiFollowerInstance random_multi_follower(std::size_t A, std::vector<std::size_t> arm_counts,
                                                   std::uint64_t seed,
                                                   NoiseKind noise = NoiseKind::kBernoulli) {
  Rng rng = make_stream(seed, Stream::kGenerator);
  std::vector<std::vector<double>> means;
  for (auto B : arm_counts) {
    std::vector<double> m(A * B);
    for (auto& x : m) x = rng.uniform();
    means.push_back(std::move(m));
  }
  return MultiFollowerInstance(A, std::move(arm_counts), std::move(means), noise);
}

inline DeepBanditInstance random_deep(std::size_t D, std::size_t A, std::uint64_t seed,
                                      NoiseKind noise = NoiseKind::kBernoulli) {
  Rng rng = make_stream(seed, Stream::kGenerator);
  std::vector<double> m(detail::ipow(A, D));
  for (auto& x : m) x = rng.uniform();
  return DeepBanditInstance(D, A, std::move(m), noise);
}

// Rewards uniform on [0,1]; each transition row is a flat-Dirichlet draw.
inline MdpInstance random_mdp(std::size_t S, std::size_t A, std::size_t B, std::size_t H,
                              std::uint64_t seed, NoiseKind noise = NoiseKind::kBernoulli) {
  Rng rng = make_stream(seed, Stream::kGenerator);
  std::vector<double> rewards(S * A * B);
  for (auto& r : rewards) r = rng.uniform();
  std::vector<double> transitions(S * A * B * S);
  for (std::size_t row = 0; row < S * A * B; ++row) {
    double sum = 0.0;
    for (std::size_t sp = 0; sp < S; ++sp) {
      const double e = -std::log(1.0 - rng.uniform());
      transitions[row * S + sp] = e;
      sum += e;
    }
    for (std::size_t sp = 0; sp < S; ++sp) transitions[row * S + sp] /= sum;
  }
  return MdpInstance(S, A, B, H, std::move(rewards), std::move(transitions), 0, noise);
}

}  // namespace hier
