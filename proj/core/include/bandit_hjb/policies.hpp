#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bandit_hjb/exact_dp.hpp"
#include "bandit_hjb/grid.hpp"
#include "bandit_hjb/limit_model.hpp"
#include "bandit_hjb/posterior.hpp"

namespace bhjb {

/// Probability vector over arms.
struct PolicyDistribution {
  std::vector<double> weights;

  int argmax() const {  // ties break to the lowest index
    int best = 0;
    for (std::size_t k = 1; k < weights.size(); ++k)
      if (weights[k] > weights[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
    return best;
  }
  bool one_hot() const {
    for (double w : weights)
      if (w != 0.0 && w != 1.0) return false;
    return true;
  }
};

/// One-hot at argmax_k (s_k + f(n) alpha_hat_k) / (q_k + n beta_hat_k): the
/// rescaled optimal policy of a ratio-drift limit, mapped back to round
/// coordinates. Requires positive denominators (pull every arm once first).
PolicyDistribution exact_unregularized(const HistoryState& h, std::int64_t n, ScalingFactor f,
                                       const std::vector<double>& alpha_hat,
                                       const std::vector<double>& beta_hat);

/// Softmax weights proportional to exp((n / (lambda f(n))) * index_k);
/// exponentials are max-subtracted (the temperature reaches 1e3 in practice).
PolicyDistribution exact_regularized(const HistoryState& h, std::int64_t n, ScalingFactor f,
                                     const std::vector<double>& alpha_hat,
                                     const std::vector<double>& beta_hat, double lambda);

/// Limiting value (1-t) max_k mu_hat_k for models whose drifts are conserved
/// along the controlled dynamics (ratio and constant drifts).
double closed_form_value(const LimitModel& model, double t, const double* s_hat,
                         const double* q_hat);

/// Greedy arm of the closed form: argmax_k mu_hat_k, ties to the lowest index.
int closed_form_policy(const LimitModel& model, const double* s_hat, const double* q_hat);

struct GridPolicyResult {
  PolicyDistribution dist;
  bool clipped = false;
};

/// Rescale the history and look the policy up on a solved grid. History arms
/// map onto grid pairs through v.arm_pair; out-of-range s_hat is clipped (and
/// flagged) rather than erroring mid-episode.
GridPolicyResult grid_policy(const HistoryState& h, std::int64_t round,
                             const GridValueFunction& v, std::int64_t n, ScalingFactor f);

/// Sample each arm's mean from its posterior, play the argmax.
int thompson_beta(const std::vector<BetaParams>& posts, double gamma, BernoulliSupport support,
                  CounterRng& rng);
int thompson_normal(const std::vector<NormalParams>& posts, CounterRng& rng);

/// Index policy s_k/q_k + sqrt(2 log(delta) / q_k); requires q_k >= 1.
int ucb_unstructured(const HistoryState& h, double delta);

/// Sample the parameter vector, play argmax_k <a_k, nu>.
int thompson_linear(const GaussianVecParams& post, const std::vector<Eigen::VectorXd>& actions,
                    CounterRng& rng);

/// Running scalar statistics of the d=1 linear UCB: V accumulates x^2 (from
/// V0 = lambda_reg), W accumulates x y, nu_hat = W/V.
struct UcbLinearState {
  double V = 0.0;
  double W = 0.0;
  double nu_hat = 0.0;
};

/// argmax_k a_k nu_hat + beta sqrt(a_k^2 / V) with
/// beta = sqrt(lambda) + sqrt(2 log(n^2) + log(1 + (round-1)/lambda)).
/// Only the scalar-action form is defined; d > 1 is rejected.
int ucb_linear(const UcbLinearState& state, std::int64_t round, std::int64_t n,
               const std::vector<Eigen::VectorXd>& actions, double lambda_reg);
double ucb_linear_beta(std::int64_t round, std::int64_t n, double lambda_reg);

// ---- policy specifications (harness-facing) --------------------------------

struct BayesExactKind {
  double lambda = 0.0;  // 0 = argmax, > 0 = softmax
};
struct GridKind {
  std::shared_ptr<const GridValueFunction> value_function;
};
struct ThompsonKind {};
struct UcbKind {
  double delta = 1e6;
};
struct UcbLinearKind {
  double lambda_reg = 0.1;
};
struct DpOracleKind {
  std::shared_ptr<const DpTable> table;
};
struct UniformKind {};

/// A bound arm-selection rule: the kind plus the horizon, scaling and
/// posterior engine it consults.
struct PolicySpec {
  std::string token;
  std::variant<BayesExactKind, GridKind, ThompsonKind, UcbKind, UcbLinearKind, DpOracleKind,
               UniformKind>
      kind;
  std::int64_t n = 0;
  ScalingFactor f = ScalingFactor::sqrt_n();
  std::vector<double> alpha_hat, beta_hat;  // bayes closed form
  std::optional<BetaParams> beta_prior;
  std::optional<NormalParams> normal_prior;
  std::optional<GaussianVecParams> gauss_prior;
};

}  // namespace bhjb
