#pragma once

// Seedable random streams.
//
// Every run owns one `RngStreams` built from a 64-bit seed. Each random consumer
// (rewards, transitions, instance generation) draws from its own substream whose
// engine seed is splitmix64(seed ^ golden * (stream_id + 1)), so adding a consumer
// never shifts the draws another consumer sees.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the standard.
// Uniform doubles are produced from the top 53 bits directly instead of through
// std::uniform_real_distribution, whose algorithm is implementation-defined.

#include <cstdint>
#include <random>

namespace hier {

inline constexpr int kRngVersion = 1;

enum class Stream : std::uint64_t {
  kRewards = 0,
  kTransitions = 1,
  kGenerator = 2,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n); Lemire-style rejection keeps it exact.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

inline Rng make_stream(std::uint64_t seed, Stream stream) {
  const auto id = static_cast<std::uint64_t>(stream);
  return Rng(splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (id + 1))));
}

struct RngStreams {
  explicit RngStreams(std::uint64_t seed)
      : rewards(make_stream(seed, Stream::kRewards)),
        transitions(make_stream(seed, Stream::kTransitions)) {}
  Rng rewards;
  Rng transitions;
};

}  // namespace hier
