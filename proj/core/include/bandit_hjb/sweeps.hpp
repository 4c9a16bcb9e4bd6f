#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bandit_hjb/episode.hpp"
#include "bandit_hjb/scaling.hpp"

namespace bhjb {

struct RegretRow {
  std::string policy;
  double param = 0.0;
  std::int64_t n = 0;
  std::int64_t sims = 0;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  std::int64_t clip_count = 0;
  bool failed = false;
};

struct RegretReport {
  std::vector<RegretRow> rows;
};

struct ConvergenceRow {
  std::int64_t n = 0;
  std::int64_t N = -1;  // -1: closed-form comparison (no grid)
  std::string f_family;
  double e_pi = 0.0;
  double e_w = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
};

/// A regret experiment: environment family, parameter grid, priors the
/// policies consult, horizon, simulation count and seeds.
///
/// Parameter-grid semantics per family: normal sweeps the gap of arms 2..K
/// over arm 1 (delta.grid); linear sweeps the scalar environment parameter
/// (nu.grid); bernoulli sweeps arm 1's success probability with arms 2..K
/// pinned at nu_rest (nu.grid), the one-armed shape.
struct ExperimentConfig {
  std::string family = "normal";  // normal | linear | bernoulli
  int K = 2;
  int d = 1;
  std::int64_t n = 1000;
  std::int64_t sims = 100;
  double sigma = 1.0;
  double mu1 = 0.0;                // normal: first-arm mean; others sit at mu1 + delta
  double nu_rest = 0.5;            // bernoulli: success probability of arms 2..K
  double gamma = 1.0;              // bernoulli payout magnitude
  BernoulliSupport support = BernoulliSupport::zero_one;
  std::vector<double> param_grid;
  std::vector<Eigen::VectorXd> actions;
  Eigen::VectorXd prior_mean_dir;  // linear prior mean direction
  PowerSeq alpha = PowerSeq::constant(1.0);  // bernoulli Beta prior sequences
  PowerSeq beta = PowerSeq::constant(1.0);
  PowerSeq prior_mean;
  PowerSeq prior_var = PowerSeq::constant(1.0);
  PowerSeq prior_cov = PowerSeq::constant(1.0);
  ScalingFactor scaling = ScalingFactor::sqrt_n();
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
  double ucb_delta = 0.0;  // 0: defaults to n^2
  double bayes_lambda = 1.0;
  double ucb_lin_lambda = 0.1;

  static ExperimentConfig from_keyvalues(const KeyValueMap& kv);
  static ExperimentConfig from_file(const std::string& path);

  EnvSpec make_env(double param) const;

  /// Tokens: bayes | bayes-reg:<lambda> | grid:<dump> | ts | ucb:<delta> |
  /// ucb-lin:<lambda> | dp:<dump> | uniform.
  PolicySpec make_policy(const std::string& token) const;
};

/// Mean and standard error of pseudo-regret per (policy, parameter) cell over
/// `sims` episodes with per-episode derived seeds. Episode-parallel; the
/// reduction order is fixed, so reruns are byte-identical at any thread
/// count. Failed cells are kept as rows with NaN statistics.
RegretReport regret_sweep(const ExperimentConfig& cfg,
                          const std::vector<std::string>& policy_tokens);

/// The one-armed Bernoulli problem the convergence studies run on.
struct OneArmedSetup {
  PowerSeq alpha;
  PowerSeq beta;
  PowerSeq gamma = PowerSeq::constant(1.0);
  PowerSeq mu2;
  BernoulliSupport support = BernoulliSupport::pm_gamma;
  bool reachable_only = false;  // restrict error averages to reachable states
  double n_probe = 1e6;
};

/// +-1 rewards, Beta(n, n - sqrt n) prior, known arm paying 1/(3 sqrt n).
OneArmedSetup default_convergence_setup();

/// Per-horizon averaged gaps between backward induction and the closed-form
/// limit (policy disagreement rate e_pi, value gap e_w), averaged over the
/// full round-state rectangles.
ConvergenceReport convergence_exact(const std::vector<std::int64_t>& n_list, ScalingFactor f,
                                    const OneArmedSetup& setup = default_convergence_setup());

/// Same gaps against grid solves with N mesh points: dt = dq = 1/N and
/// ds = 1/sqrt(N) (sqrt scaling, diffusive) or ds = 1/N (linear scaling,
/// upwind); the sqrt-scaling value gap is rescaled by 1/sqrt(n) onto the
/// linear scale. The backward induction streams against all N at once.
ConvergenceReport convergence_numeric(const std::vector<std::int64_t>& n_list,
                                      const std::vector<int>& N_list, ScalingFactor f,
                                      const OneArmedSetup& setup = default_convergence_setup());

/// Beta hyperparameter sequences for which the diffusive grid solve at
/// dt = dq = 1/n, ds = gamma/sqrt(n) reproduces backward induction exactly:
/// (c1 n + c2 sqrt n, c1 n - c2 sqrt n). The unbalanced variant drops the n
/// term from beta; it is exposed for comparison but not exact.
std::pair<PowerSeq, PowerSeq> binomial_exact_grid_hyperparams(double c1, double c2,
                                                              bool unbalanced_variant = false);

/// Max |w^i(s,q)/f(n) - grid value| over every round-state of the one-armed
/// problem, with the grid at the matched mesh: dt = dq = ds = 1/n (linear
/// scaling, upwind) or dt = dq = 1/n, ds = gamma/sqrt(n) (sqrt scaling,
/// diffusive). n-linear hyperparameters make this zero up to roundoff.
double max_grid_dp_gap(std::int64_t n, ScalingFactor f, const OneArmedSetup& setup);

/// CSV emission, 12 significant digits, header always present.
/// Regret schema: policy,param,n,sims,mean_regret,stderr,clip_count.
/// Convergence schema: n,N,f_family,e_pi,e_w (N empty on closed-form rows).
void emit_csv(const RegretReport& report, const std::string& path);
void emit_csv(const ConvergenceReport& report, const std::string& path);

}  // namespace bhjb
