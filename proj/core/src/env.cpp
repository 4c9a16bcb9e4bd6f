#include "bandit_hjb/env.hpp"

#include <cmath>
#include <string>

#include "bandit_hjb/errors.hpp"

namespace bhjb {

int num_arms(const EnvSpec& env) {
  return std::visit(
      [](const auto& e) -> int {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, LinearEnvSpec>)
          return static_cast<int>(e.actions.size());
        else
          return static_cast<int>(e.nu.size());
      },
      env);
}

std::vector<double> true_means(const EnvSpec& env) {
  if (const auto* b = std::get_if<BernoulliEnvSpec>(&env)) {
    std::vector<double> mu(b->nu.size());
    for (std::size_t k = 0; k < b->nu.size(); ++k) {
      mu[k] = b->support == BernoulliSupport::zero_one
                  ? b->nu[k]
                  : b->gamma * (2.0 * b->nu[k] - 1.0);
    }
    return mu;
  }
  if (const auto* nrm = std::get_if<NormalEnvSpec>(&env)) return nrm->nu;
  const auto& lin = std::get<LinearEnvSpec>(env);
  std::vector<double> mu(lin.actions.size());
  for (std::size_t k = 0; k < lin.actions.size(); ++k) mu[k] = lin.actions[k].dot(lin.nu);
  return mu;
}

double sample_reward(const EnvSpec& env, int arm, CounterRng& rng) {
  if (const auto* b = std::get_if<BernoulliEnvSpec>(&env)) {
    const bool success = rng.next_double() < b->nu[static_cast<std::size_t>(arm)];
    if (b->support == BernoulliSupport::zero_one) return success ? 1.0 : 0.0;
    return success ? b->gamma : -b->gamma;
  }
  if (const auto* nrm = std::get_if<NormalEnvSpec>(&env))
    return nrm->nu[static_cast<std::size_t>(arm)] + nrm->sigma * rng.next_normal();
  const auto& lin = std::get<LinearEnvSpec>(env);
  return lin.actions[static_cast<std::size_t>(arm)].dot(lin.nu) + lin.sigma * rng.next_normal();
}

HistoryState apply_step(const HistoryState& h, int arm, double reward) {
  HistoryState next = h;
  next.s[static_cast<std::size_t>(arm)] += reward;
  next.q[static_cast<std::size_t>(arm)] += 1;
  next.round += 1;
  return next;
}

void validate(const EnvSpec& env) {
  if (const auto* b = std::get_if<BernoulliEnvSpec>(&env)) {
    if (b->gamma <= 0.0) throw ConfigError("bernoulli env: gamma must be positive");
    if (b->nu.empty()) throw ConfigError("bernoulli env: needs at least one arm");
    for (double p : b->nu)
      if (p < 0.0 || p > 1.0)
        throw ConfigError("bernoulli env: success probability outside [0,1]: " + std::to_string(p));
    return;
  }
  if (const auto* nrm = std::get_if<NormalEnvSpec>(&env)) {
    if (nrm->sigma <= 0.0) throw ConfigError("normal env: sigma must be positive");
    if (nrm->nu.empty()) throw ConfigError("normal env: needs at least one arm");
    return;
  }
  const auto& lin = std::get<LinearEnvSpec>(env);
  if (lin.sigma <= 0.0) throw ConfigError("linear env: sigma must be positive");
  if (lin.actions.empty()) throw ConfigError("linear env: needs at least one action");
  for (const auto& a : lin.actions)
    if (a.size() != lin.nu.size())
      throw ConfigError("linear env: action dimension does not match parameter dimension");
}

EnvSpec env_from_keyvalues(const KeyValueMap& kv) {
  const std::string family = kv.get_string("family");
  if (family == "bernoulli") {
    BernoulliEnvSpec b;
    b.nu = kv.get_double_list("nu");
    b.gamma = kv.get_double_or("gamma", 1.0);
    const std::string sup = kv.get_string_or("support", "pm-gamma");
    if (sup == "zero-one")
      b.support = BernoulliSupport::zero_one;
    else if (sup == "pm-gamma")
      b.support = BernoulliSupport::pm_gamma;
    else
      throw ConfigError(kv.origin() + ": unknown support '" + sup + "' (zero-one | pm-gamma)");
    EnvSpec env = b;
    validate(env);
    return env;
  }
  if (family == "normal") {
    NormalEnvSpec nrm;
    nrm.nu = kv.get_double_list("nu");
    nrm.sigma = kv.get_double_or("sigma", 1.0);
    EnvSpec env = nrm;
    validate(env);
    return env;
  }
  if (family == "linear") {
    LinearEnvSpec lin;
    lin.sigma = kv.get_double_or("sigma", 1.0);
    const auto nu = kv.get_double_list("nu");
    lin.nu = Eigen::Map<const Eigen::VectorXd>(nu.data(), static_cast<Eigen::Index>(nu.size()));
    const long long K = kv.get_int("K");
    for (long long k = 1; k <= K; ++k) {
      const auto a = kv.get_double_list("action." + std::to_string(k));
      lin.actions.emplace_back(
          Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())));
    }
    EnvSpec env = lin;
    validate(env);
    return env;
  }
  throw ConfigError(kv.origin() + ": unknown family '" + family + "' (bernoulli | normal | linear)");
}

}  // namespace bhjb
