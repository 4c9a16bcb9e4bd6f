#pragma once

#include <variant>
#include <vector>

#include "bandit_hjb/key_value.hpp"
#include "bandit_hjb/rng.hpp"
#include "bandit_hjb/types.hpp"

namespace bhjb {

/// K independent Bernoulli arms paying either {0,1} or {-gamma,+gamma}.
struct BernoulliEnvSpec {
  std::vector<double> nu;  // success probabilities, in [0,1]
  double gamma = 1.0;
  BernoulliSupport support = BernoulliSupport::pm_gamma;
};

/// K independent arms with N(nu_k, sigma^2) rewards.
struct NormalEnvSpec {
  std::vector<double> nu;
  double sigma = 1.0;
};

/// Reward <a_k, nu> + N(0, sigma^2); pulling one arm informs all of them.
struct LinearEnvSpec {
  Eigen::VectorXd nu;
  std::vector<Eigen::VectorXd> actions;
  double sigma = 1.0;
};

using EnvSpec = std::variant<BernoulliEnvSpec, NormalEnvSpec, LinearEnvSpec>;

int num_arms(const EnvSpec& env);

/// True expected reward of each arm under the environment parameter.
std::vector<double> true_means(const EnvSpec& env);

/// Draw one reward for `arm`; consumes draws from `rng`.
double sample_reward(const EnvSpec& env, int arm, CounterRng& rng);

/// s_arm += reward, q_arm += 1, round += 1.
HistoryState apply_step(const HistoryState& h, int arm, double reward);

/// Validate invariants (probabilities in range, positive sigma/gamma, action
/// dimensions); throws ConfigError.
void validate(const EnvSpec& env);

/// Build an environment from a flat key=value block: family=bernoulli|normal|linear,
/// K, nu=<list>, sigma, gamma, support=zero-one|pm-gamma, d, action.<k>=<list>.
EnvSpec env_from_keyvalues(const KeyValueMap& kv);

}  // namespace bhjb
