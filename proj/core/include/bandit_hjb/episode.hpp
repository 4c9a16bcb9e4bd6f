#pragma once

#include <cstdint>

#include "bandit_hjb/env.hpp"
#include "bandit_hjb/policies.hpp"

namespace bhjb {

struct EpisodeResult {
  double cumulative_reward = 0.0;
  double regret = 0.0;  // pseudo-regret: sum of true-mean gaps, not sampled rewards
  std::int64_t clip_events = 0;
};

/// Simulate one episode: rounds 1..K pull arms 1..K in order (every index
/// policy assumes this initialization), then the policy chooses. Per-round
/// generators derive from (seed, round), so results are independent of
/// scheduling order. Policy failures rethrow with the round attached.
EpisodeResult run_episode(const PolicySpec& policy, const EnvSpec& env, std::int64_t n,
                          std::uint64_t seed);

}  // namespace bhjb
