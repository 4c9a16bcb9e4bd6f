#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bandit_hjb/env.hpp"
#include "bandit_hjb/types.hpp"

namespace bhjb {

struct DpOptions {
  bool persist_all = true;  // keep every round's values + actions
  std::uint64_t memory_cap_bytes = 2ull * 1024 * 1024 * 1024;
};

/// Dense state rectangle of one backward-induction round. Rewards are indexed
/// by integer step counts m: s = m for {0,1} support, s = gamma*m for
/// +-gamma. The rectangle covers m in [m_lo, m_lo+m_count) and q in
/// [0, q_count) per pair, including combinatorially unreachable corners.
struct RoundLayout {
  std::int64_t round = 1;
  std::int64_t m_lo = 0;
  std::int64_t m_count = 1;
  std::int64_t q_count = 1;
  int pairs = 1;
  std::int64_t states = 1;

  std::int64_t flatten(const std::int64_t* m, const std::int64_t* q) const {
    std::int64_t idx = 0;
    for (int p = 0; p < pairs; ++p) idx = idx * m_count + (m[p] - m_lo);
    for (int p = 0; p < pairs; ++p) idx = idx * q_count + q[p];
    return idx;
  }
  bool contains(const std::int64_t* m, const std::int64_t* q) const {
    for (int p = 0; p < pairs; ++p) {
      if (m[p] < m_lo || m[p] >= m_lo + m_count) return false;
      if (q[p] < 0 || q[p] >= q_count) return false;
    }
    return true;
  }
};

RoundLayout layout_for_round(std::int64_t round, int pairs, BernoulliSupport support);

/// Exact optimal value function and policy from backward induction over
/// Bernoulli histories. One-armed tables have a single state pair (the unknown
/// arm) plus a known arm paying mu2; action index pairs = the known arm.
struct DpTable {
  std::int64_t n = 0;
  int pairs = 1;
  int num_actions = 1;
  bool one_armed = false;
  double mu2 = 0.0;
  BernoulliSupport support = BernoulliSupport::zero_one;
  double gamma = 1.0;
  std::vector<BetaParams> priors;

  // Rounds 1..n+1; empty when solved without persistence.
  std::vector<std::vector<double>> values;        // values[i-1]
  std::vector<std::vector<std::uint8_t>> actions;  // actions[i-1], rounds 1..n

  RoundLayout layout(std::int64_t round) const {
    RoundLayout l = layout_for_round(round, pairs, support);
    return l;
  }
  double value(std::int64_t round, const std::int64_t* m, const std::int64_t* q) const;
  int action(std::int64_t round, const std::int64_t* m, const std::int64_t* q) const;
  double root_value() const;  // w^1 at the all-zero state
};

/// Unknown Bernoulli arm vs a known arm paying mu2 per round.
DpTable solve_one_armed_bernoulli(std::int64_t n, const BetaParams& prior, double mu2,
                                  BernoulliSupport support, double gamma = 1.0,
                                  const DpOptions& opts = {});

/// K independent Bernoulli arms, K <= 3 (cost grows as n^(2K+1)).
DpTable solve_k_armed(std::int64_t n, const std::vector<BetaParams>& priors, double gamma,
                      BernoulliSupport support, const DpOptions& opts = {});

/// Entry point keyed on an environment; continuous-reward families are
/// rejected (backward induction needs a discrete support).
DpTable solve_dp_for_env(const EnvSpec& env, std::int64_t n, const std::vector<BetaParams>& priors,
                         const DpOptions& opts = {});

/// One backward-induction round handed to a streaming visitor (round n down
/// to 1). Spans are valid only during the call.
struct DpRoundView {
  std::int64_t round;
  const double* values;
  const std::uint8_t* actions;
  RoundLayout layout;
};
using DpRoundVisitor = std::function<void(const DpRoundView&)>;

/// Backward induction without table persistence; memory stays at two rounds.
void sweep_one_armed_bernoulli(std::int64_t n, const BetaParams& prior, double mu2,
                               BernoulliSupport support, double gamma,
                               const DpRoundVisitor& visitor, const DpOptions& opts = {});

/// Greedy arm of a solved table at (round, history); ties break to the lowest
/// index. Throws std::out_of_range outside the table rectangle.
int optimal_action(const DpTable& table, std::int64_t round, const HistoryState& h);

void dump_dp_table(const DpTable& table, const std::string& path);
DpTable load_dp_table(const std::string& path, const DpOptions& opts = {});

}  // namespace bhjb
