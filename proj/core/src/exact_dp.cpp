#include "bandit_hjb/exact_dp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bandit_hjb/errors.hpp"

namespace bhjb {
namespace {

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

double persist_bytes(std::int64_t n, int pairs, BernoulliSupport support) {
  double total = 0.0;
  for (std::int64_t i = 1; i <= n + 1; ++i) {
    const RoundLayout l = layout_for_round(i, pairs, support);
    total += static_cast<double>(l.states) * 9.0;  // 8B value + 1B action
  }
  return total;
}

double streaming_bytes(std::int64_t n, int pairs, BernoulliSupport support) {
  const RoundLayout l = layout_for_round(n + 1, pairs, support);
  return static_cast<double>(l.states) * (8.0 + 8.0 + 1.0);
}

void check_capacity(double required, const DpOptions& opts, const char* mode) {
  if (required > static_cast<double>(opts.memory_cap_bytes)) {
    std::uint64_t req = required > 1e18 ? ~0ull : static_cast<std::uint64_t>(required);
    throw CapacityError(std::string("backward-induction table (") + mode + ") needs ~" +
                            std::to_string(req) + " bytes, over the cap of " +
                            std::to_string(opts.memory_cap_bytes) +
                            "; raise the cap or reduce n/K",
                        req);
  }
}

struct DpProblem {
  std::vector<BetaParams> priors;  // unknown arms, one per pair
  bool one_armed = false;
  double mu2 = 0.0;
  BernoulliSupport support = BernoulliSupport::zero_one;
  double gamma = 1.0;
};

/// Single-pair rounds dominate the large-n studies; keep their inner loop flat.
void dp_round_single_pair(const DpProblem& prob, const RoundLayout& lay,
                          const RoundLayout& lay_next, const std::vector<double>& next,
                          std::vector<double>& cur, std::vector<std::uint8_t>& act) {
  const BetaParams& pr = prob.priors[0];
  const bool zero_one = prob.support == BernoulliSupport::zero_one;
  const double ab = pr.alpha + pr.beta;
  std::int64_t idx = 0;
  for (std::int64_t mm = lay.m_lo; mm < lay.m_lo + lay.m_count; ++mm) {
    const std::int64_t up_base = (mm + 1 - lay_next.m_lo) * lay_next.q_count;
    const std::int64_t dn_base =
        ((zero_one ? mm : mm - 1) - lay_next.m_lo) * lay_next.q_count;
    const std::int64_t same_base = (mm - lay_next.m_lo) * lay_next.q_count;
    const double md = static_cast<double>(mm);
    for (std::int64_t qq = 0; qq < lay.q_count; ++qq, ++idx) {
      const double qd = static_cast<double>(qq);
      double p_succ, mean;
      if (zero_one) {
        p_succ = (pr.alpha + md) / (ab + qd);
        mean = p_succ;
      } else {
        p_succ = (pr.alpha + 0.5 * md + 0.5 * qd) / (ab + qd);
        mean = prob.gamma * (2.0 * p_succ - 1.0);
      }
      const double w_pull = mean + p_succ * next[static_cast<std::size_t>(up_base + qq + 1)] +
                            (1.0 - p_succ) * next[static_cast<std::size_t>(dn_base + qq + 1)];
      double best = w_pull;
      std::uint8_t a = 0;
      if (prob.one_armed) {
        const double w_known = prob.mu2 + next[static_cast<std::size_t>(same_base + qq)];
        if (w_known > best) {
          best = w_known;
          a = 1;
        }
      }
      cur[static_cast<std::size_t>(idx)] = best;
      act[static_cast<std::size_t>(idx)] = a;
    }
  }
}

/// Backward induction over the full rectangle; visitor sees rounds n..1.
void dp_sweep(std::int64_t n, const DpProblem& prob, const DpRoundVisitor& visitor) {
  const int pairs = static_cast<int>(prob.priors.size());
  std::vector<double> next(static_cast<std::size_t>(layout_for_round(n + 1, pairs, prob.support).states), 0.0);
  std::vector<double> cur;
  std::vector<std::uint8_t> act;

  std::vector<std::int64_t> m(static_cast<std::size_t>(pairs), 0);
  std::vector<std::int64_t> q(static_cast<std::size_t>(pairs), 0);
  std::vector<std::int64_t> m2(static_cast<std::size_t>(pairs), 0);
  std::vector<std::int64_t> q2(static_cast<std::size_t>(pairs), 0);

  for (std::int64_t i = n; i >= 1; --i) {
    const RoundLayout lay = layout_for_round(i, pairs, prob.support);
    const RoundLayout lay_next = layout_for_round(i + 1, pairs, prob.support);
    cur.assign(static_cast<std::size_t>(lay.states), 0.0);
    act.assign(static_cast<std::size_t>(lay.states), 0);

    if (pairs == 1) {
      dp_round_single_pair(prob, lay, lay_next, next, cur, act);
      visitor(DpRoundView{i, cur.data(), act.data(), lay});
      next.swap(cur);
      continue;
    }

    // Nested iteration over the rectangle: m-multi-index outer, q inner.
    std::int64_t idx = 0;
    const std::function<void(int)> loop_q = [&](int depth) {
      if (depth == pairs) {
        double best = -std::numeric_limits<double>::infinity();
        int best_arm = 0;
        for (int k = 0; k < pairs; ++k) {
          const BetaParams& pr = prob.priors[static_cast<std::size_t>(k)];
          const double qk = static_cast<double>(q[static_cast<std::size_t>(k)]);
          const double mk = static_cast<double>(m[static_cast<std::size_t>(k)]);
          double p_succ, mean;
          if (prob.support == BernoulliSupport::zero_one) {
            p_succ = (pr.alpha + mk) / (pr.alpha + pr.beta + qk);
            mean = p_succ;
          } else {
            p_succ = (pr.alpha + 0.5 * mk + 0.5 * qk) / (pr.alpha + pr.beta + qk);
            mean = prob.gamma * (2.0 * p_succ - 1.0);
          }
          for (int p = 0; p < pairs; ++p) {
            m2[static_cast<std::size_t>(p)] = m[static_cast<std::size_t>(p)];
            q2[static_cast<std::size_t>(p)] = q[static_cast<std::size_t>(p)];
          }
          q2[static_cast<std::size_t>(k)] += 1;
          m2[static_cast<std::size_t>(k)] += 1;
          const double w_up = next[static_cast<std::size_t>(lay_next.flatten(m2.data(), q2.data()))];
          m2[static_cast<std::size_t>(k)] -=
              prob.support == BernoulliSupport::zero_one ? 1 : 2;
          const double w_dn = next[static_cast<std::size_t>(lay_next.flatten(m2.data(), q2.data()))];
          const double w = mean + p_succ * w_up + (1.0 - p_succ) * w_dn;
          if (w > best) {
            best = w;
            best_arm = k;
          }
        }
        if (prob.one_armed) {
          const double w = prob.mu2 + next[static_cast<std::size_t>(lay_next.flatten(m.data(), q.data()))];
          if (w > best) {
            best = w;
            best_arm = pairs;
          }
        }
        cur[static_cast<std::size_t>(idx)] = best;
        act[static_cast<std::size_t>(idx)] = static_cast<std::uint8_t>(best_arm);
        ++idx;
        return;
      }
      for (std::int64_t qq = 0; qq < lay.q_count; ++qq) {
        q[static_cast<std::size_t>(depth)] = qq;
        loop_q(depth + 1);
      }
    };
    const std::function<void(int)> loop_m = [&](int depth) {
      if (depth == pairs) {
        loop_q(0);
        return;
      }
      for (std::int64_t mm = lay.m_lo; mm < lay.m_lo + lay.m_count; ++mm) {
        m[static_cast<std::size_t>(depth)] = mm;
        loop_m(depth + 1);
      }
    };
    loop_m(0);

    visitor(DpRoundView{i, cur.data(), act.data(), lay});
    next.swap(cur);
  }
}

DpTable solve_common(std::int64_t n, const DpProblem& prob, const DpOptions& opts) {
  const int pairs = static_cast<int>(prob.priors.size());
  check_capacity(opts.persist_all ? persist_bytes(n, pairs, prob.support)
                                  : streaming_bytes(n, pairs, prob.support),
                 opts, opts.persist_all ? "persist" : "streaming");
  DpTable table;
  table.n = n;
  table.pairs = pairs;
  table.one_armed = prob.one_armed;
  table.num_actions = pairs + (prob.one_armed ? 1 : 0);
  table.mu2 = prob.mu2;
  table.support = prob.support;
  table.gamma = prob.gamma;
  table.priors = prob.priors;
  if (opts.persist_all) {
    table.values.resize(static_cast<std::size_t>(n + 1));
    table.actions.resize(static_cast<std::size_t>(n));
    table.values[static_cast<std::size_t>(n)].assign(
        static_cast<std::size_t>(layout_for_round(n + 1, pairs, prob.support).states), 0.0);
    dp_sweep(n, prob, [&](const DpRoundView& view) {
      table.values[static_cast<std::size_t>(view.round - 1)]
          .assign(view.values, view.values + view.layout.states);
      table.actions[static_cast<std::size_t>(view.round - 1)]
          .assign(view.actions, view.actions + view.layout.states);
    });
  } else {
    dp_sweep(n, prob, [](const DpRoundView&) {});
  }
  return table;
}

}  // namespace

RoundLayout layout_for_round(std::int64_t round, int pairs, BernoulliSupport support) {
  RoundLayout l;
  l.round = round;
  l.pairs = pairs;
  l.q_count = round;
  if (support == BernoulliSupport::zero_one) {
    l.m_lo = 0;
    l.m_count = round;
  } else {
    l.m_lo = -(round - 1);
    l.m_count = 2 * round - 1;
  }
  l.states = ipow(l.m_count * l.q_count, pairs);
  return l;
}

double DpTable::value(std::int64_t round, const std::int64_t* m, const std::int64_t* q) const {
  if (round < 1 || round > n + 1 || values.empty())
    throw std::out_of_range("dp table: round " + std::to_string(round) + " not stored");
  const RoundLayout l = layout(round);
  if (!l.contains(m, q)) throw std::out_of_range("dp table: state outside round rectangle");
  return values[static_cast<std::size_t>(round - 1)][static_cast<std::size_t>(l.flatten(m, q))];
}

int DpTable::action(std::int64_t round, const std::int64_t* m, const std::int64_t* q) const {
  if (round < 1 || round > n || actions.empty())
    throw std::out_of_range("dp table: actions for round " + std::to_string(round) + " not stored");
  const RoundLayout l = layout(round);
  if (!l.contains(m, q)) throw std::out_of_range("dp table: state outside round rectangle");
  return actions[static_cast<std::size_t>(round - 1)][static_cast<std::size_t>(l.flatten(m, q))];
}

double DpTable::root_value() const {
  std::vector<std::int64_t> z(static_cast<std::size_t>(pairs), 0);
  return value(1, z.data(), z.data());
}

DpTable solve_one_armed_bernoulli(std::int64_t n, const BetaParams& prior, double mu2,
                                  BernoulliSupport support, double gamma,
                                  const DpOptions& opts) {
  if (n < 1) throw ConfigError("backward induction: horizon must be >= 1");
  DpProblem prob{{prior}, true, mu2, support, gamma};
  return solve_common(n, prob, opts);
}

DpTable solve_k_armed(std::int64_t n, const std::vector<BetaParams>& priors, double gamma,
                      BernoulliSupport support, const DpOptions& opts) {
  if (n < 1) throw ConfigError("backward induction: horizon must be >= 1");
  if (priors.empty() || priors.size() > 3)
    throw ConfigError("backward induction: K must be between 1 and 3 (cost grows as n^(2K+1))");
  DpProblem prob{priors, false, 0.0, support, gamma};
  return solve_common(n, prob, opts);
}

DpTable solve_dp_for_env(const EnvSpec& env, std::int64_t n, const std::vector<BetaParams>& priors,
                         const DpOptions& opts) {
  const auto* b = std::get_if<BernoulliEnvSpec>(&env);
  if (!b)
    throw UnsupportedFamilyError(
        "backward induction needs a discrete reward support; normal/linear families are served "
        "by the grid solver");
  return solve_k_armed(n, priors, b->gamma, b->support, opts);
}

void sweep_one_armed_bernoulli(std::int64_t n, const BetaParams& prior, double mu2,
                               BernoulliSupport support, double gamma,
                               const DpRoundVisitor& visitor, const DpOptions& opts) {
  if (n < 1) throw ConfigError("backward induction: horizon must be >= 1");
  check_capacity(streaming_bytes(n, 1, support), opts, "streaming");
  DpProblem prob{{prior}, true, mu2, support, gamma};
  dp_sweep(n, prob, visitor);
}

int optimal_action(const DpTable& table, std::int64_t round, const HistoryState& h) {
  std::vector<std::int64_t> m(static_cast<std::size_t>(table.pairs));
  std::vector<std::int64_t> q(static_cast<std::size_t>(table.pairs));
  for (int p = 0; p < table.pairs; ++p) {
    const double s = h.s[static_cast<std::size_t>(p)];
    m[static_cast<std::size_t>(p)] =
        table.support == BernoulliSupport::zero_one ? std::llround(s) : std::llround(s / table.gamma);
    q[static_cast<std::size_t>(p)] = h.q[static_cast<std::size_t>(p)];
  }
  return table.action(round, m.data(), q.data());
}

void dump_dp_table(const DpTable& table, const std::string& path) {
  if (table.values.empty())
    throw ConfigError("dp dump: table was solved without persistence");
  std::ofstream out(path);
  if (!out) throw ConfigError("dp dump: cannot open " + path);
  char buf[64];
  out << table.n << ' ' << table.pairs << ' '
      << (table.support == BernoulliSupport::zero_one ? "zero-one" : "pm-gamma") << ' '
      << table.gamma << '\n';
  std::vector<std::int64_t> m(static_cast<std::size_t>(table.pairs));
  std::vector<std::int64_t> q(static_cast<std::size_t>(table.pairs));
  for (std::int64_t i = 1; i <= table.n; ++i) {
    const RoundLayout lay = table.layout(i);
    std::int64_t idx = 0;
    const std::function<void(int)> loop_q = [&](int depth) {
      if (depth == lay.pairs) {
        out << i;
        for (int p = 0; p < lay.pairs; ++p) {
          const double s = table.support == BernoulliSupport::zero_one
                               ? static_cast<double>(m[static_cast<std::size_t>(p)])
                               : table.gamma * static_cast<double>(m[static_cast<std::size_t>(p)]);
          std::snprintf(buf, sizeof buf, " %.17g", s);
          out << buf;
        }
        for (int p = 0; p < lay.pairs; ++p) out << ' ' << q[static_cast<std::size_t>(p)];
        std::snprintf(buf, sizeof buf, " %.17g",
                      table.values[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(idx)]);
        out << buf << ' '
            << static_cast<int>(
                   table.actions[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(idx)])
            << '\n';
        ++idx;
        return;
      }
      for (std::int64_t qq = 0; qq < lay.q_count; ++qq) {
        q[static_cast<std::size_t>(depth)] = qq;
        loop_q(depth + 1);
      }
    };
    const std::function<void(int)> loop_m = [&](int depth) {
      if (depth == lay.pairs) {
        loop_q(0);
        return;
      }
      for (std::int64_t mm = lay.m_lo; mm < lay.m_lo + lay.m_count; ++mm) {
        m[static_cast<std::size_t>(depth)] = mm;
        loop_m(depth + 1);
      }
    };
    loop_m(0);
  }
}

DpTable load_dp_table(const std::string& path, const DpOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ConfigError("dp load: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("dp load: empty file " + path);
  std::istringstream hs(header);
  DpTable table;
  std::string support;
  if (!(hs >> table.n >> table.pairs >> support >> table.gamma))
    throw ConfigError("dp load: bad header in " + path);
  if (support == "zero-one")
    table.support = BernoulliSupport::zero_one;
  else if (support == "pm-gamma")
    table.support = BernoulliSupport::pm_gamma;
  else
    throw ConfigError("dp load: unknown support '" + support + "'");

  check_capacity(persist_bytes(table.n, table.pairs, table.support), opts, "persist");
  table.values.resize(static_cast<std::size_t>(table.n + 1));
  table.actions.resize(static_cast<std::size_t>(table.n));
  for (std::int64_t i = 1; i <= table.n + 1; ++i) {
    const RoundLayout lay = table.layout(i);
    table.values[static_cast<std::size_t>(i - 1)]
        .assign(static_cast<std::size_t>(lay.states), std::numeric_limits<double>::quiet_NaN());
    if (i <= table.n)
      table.actions[static_cast<std::size_t>(i - 1)].assign(static_cast<std::size_t>(lay.states), 255);
  }
  table.values[static_cast<std::size_t>(table.n)]
      .assign(table.values[static_cast<std::size_t>(table.n)].size(), 0.0);

  std::vector<std::int64_t> m(static_cast<std::size_t>(table.pairs));
  std::vector<std::int64_t> q(static_cast<std::size_t>(table.pairs));
  std::string line;
  int max_action = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::int64_t i;
    if (!(ls >> i)) throw ConfigError("dp load: bad row '" + line + "'");
    for (int p = 0; p < table.pairs; ++p) {
      double s;
      ls >> s;
      m[static_cast<std::size_t>(p)] = table.support == BernoulliSupport::zero_one
                                           ? std::llround(s)
                                           : std::llround(s / table.gamma);
    }
    for (int p = 0; p < table.pairs; ++p) ls >> q[static_cast<std::size_t>(p)];
    double value;
    int action;
    if (!(ls >> value >> action)) throw ConfigError("dp load: bad row '" + line + "'");
    const RoundLayout lay = table.layout(i);
    if (i < 1 || i > table.n || !lay.contains(m.data(), q.data()))
      throw ConfigError("dp load: row outside table rectangle: '" + line + "'");
    const auto idx = static_cast<std::size_t>(lay.flatten(m.data(), q.data()));
    table.values[static_cast<std::size_t>(i - 1)][idx] = value;
    table.actions[static_cast<std::size_t>(i - 1)][idx] = static_cast<std::uint8_t>(action);
    max_action = std::max(max_action, action);
  }
  table.one_armed = max_action >= table.pairs;
  table.num_actions = table.pairs + (table.one_armed ? 1 : 0);
  return table;
}

}  // namespace bhjb
