#include "bandit_hjb/episode.hpp"

#include <algorithm>
#include <cmath>

#include "bandit_hjb/errors.hpp"

namespace bhjb {
namespace {

enum StreamPurpose : std::uint64_t { kRewardStream = 0, kPolicyStream = 1 };

int select_arm(const PolicySpec& policy, const EnvSpec& env, const HistoryState& h,
               std::int64_t round, UcbLinearState& ucb_state, CounterRng& policy_rng,
               std::int64_t& clip_events) {
  return std::visit(
      [&](const auto& kind) -> int {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, UniformKind>) {
          return static_cast<int>(policy_rng.next_u64() %
                                  static_cast<std::uint64_t>(h.num_arms()));
        } else if constexpr (std::is_same_v<T, BayesExactKind>) {
          if (kind.lambda > 0.0) {
            const PolicyDistribution d = exact_regularized(h, policy.n, policy.f,
                                                           policy.alpha_hat, policy.beta_hat,
                                                           kind.lambda);
            return policy_rng.next_categorical(d.weights.data(),
                                               static_cast<int>(d.weights.size()));
          }
          return exact_unregularized(h, policy.n, policy.f, policy.alpha_hat, policy.beta_hat)
              .argmax();
        } else if constexpr (std::is_same_v<T, GridKind>) {
          const GridPolicyResult r =
              grid_policy(h, round, *kind.value_function, policy.n, policy.f);
          if (r.clipped) ++clip_events;
          if (r.dist.one_hot()) return r.dist.argmax();
          return policy_rng.next_categorical(r.dist.weights.data(),
                                             static_cast<int>(r.dist.weights.size()));
        } else if constexpr (std::is_same_v<T, ThompsonKind>) {
          if (const auto* b = std::get_if<BernoulliEnvSpec>(&env)) {
            if (!policy.beta_prior) throw ConfigError("thompson: missing Beta prior");
            return thompson_beta(
                posteriors_bernoulli(*policy.beta_prior, b->gamma, b->support, h), b->gamma,
                b->support, policy_rng);
          }
          if (const auto* nrm = std::get_if<NormalEnvSpec>(&env)) {
            if (!policy.normal_prior) throw ConfigError("thompson: missing normal prior");
            return thompson_normal(posteriors_normal(*policy.normal_prior, nrm->sigma, h),
                                   policy_rng);
          }
          const auto& lin = std::get<LinearEnvSpec>(env);
          if (!policy.gauss_prior) throw ConfigError("thompson: missing Gaussian prior");
          const GaussianVecParams post =
              posterior_linear(*policy.gauss_prior, lin.sigma, lin.actions, h.s, h.q);
          return thompson_linear(post, lin.actions, policy_rng);
        } else if constexpr (std::is_same_v<T, UcbKind>) {
          return ucb_unstructured(h, kind.delta);
        } else if constexpr (std::is_same_v<T, UcbLinearKind>) {
          const auto* lin = std::get_if<LinearEnvSpec>(&env);
          if (!lin) throw ConfigError("linear ucb needs a linear environment");
          return ucb_linear(ucb_state, round, policy.n, lin->actions, kind.lambda_reg);
        } else if constexpr (std::is_same_v<T, DpOracleKind>) {
          return optimal_action(*kind.table, round, h);
        } else {
          static_assert(std::is_same_v<T, UniformKind>);
          return 0;
        }
      },
      policy.kind);
}

}  // namespace

EpisodeResult run_episode(const PolicySpec& policy, const EnvSpec& env, std::int64_t n,
                          std::uint64_t seed) {
  const int K = num_arms(env);
  if (n < K) throw ConfigError("episode: horizon must be at least the number of arms");
  const std::vector<double> mu = true_means(env);
  const double mu_star = *std::max_element(mu.begin(), mu.end());

  HistoryState h(K);
  UcbLinearState ucb_state;
  if (const auto* ul = std::get_if<UcbLinearKind>(&policy.kind)) ucb_state.V = ul->lambda_reg;

  EpisodeResult out;
  for (std::int64_t i = 1; i <= n; ++i) {
    int arm;
    if (i <= K) {
      arm = static_cast<int>(i - 1);
    } else {
      CounterRng policy_rng(CounterRng::derive_key({seed, static_cast<std::uint64_t>(i),
                                                    kPolicyStream}));
      try {
        arm = select_arm(policy, env, h, i, ucb_state, policy_rng, out.clip_events);
      } catch (const std::exception& e) {
        throw std::runtime_error("policy '" + policy.token + "' failed at round " +
                                 std::to_string(i) + ": " + e.what());
      }
    }
    CounterRng reward_rng(CounterRng::derive_key({seed, static_cast<std::uint64_t>(i),
                                                  kRewardStream}));
    const double reward = sample_reward(env, arm, reward_rng);
    if (std::holds_alternative<UcbLinearKind>(policy.kind)) {
      const auto* lin = std::get_if<LinearEnvSpec>(&env);
      if (!lin)
        throw std::runtime_error("policy '" + policy.token + "' failed at round " +
                                 std::to_string(i) + ": needs a linear environment");
      const double x = lin->actions[static_cast<std::size_t>(arm)](0);
      ucb_state.V += x * x;
      ucb_state.W += x * reward;
      ucb_state.nu_hat = ucb_state.W / ucb_state.V;
    }
    h = apply_step(h, arm, reward);
    out.cumulative_reward += reward;
    out.regret += mu_star - mu[static_cast<std::size_t>(arm)];
  }
  return out;
}

}  // namespace bhjb
