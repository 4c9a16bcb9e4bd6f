#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "bandit_hjb/env.hpp"
#include "bandit_hjb/scaling.hpp"
#include "bandit_hjb/types.hpp"

namespace bhjb {

/// Linear growth bound on reachable rescaled rewards: |s_hat| of a pair stays
/// inside [lo_slope * q_hat, hi_slope * q_hat] for bounded-reward families.
/// Stability probes restrict to this region when present; nodes outside it
/// never feed into nodes inside it for ratio drifts.
struct ReachEnvelope {
  double lo_slope = 0.0;
  double hi_slope = 0.0;
};

/// Limiting drift/diffusion model of a rescaled bandit problem.
///
/// Arms index policies; state pairs index the (s_hat, q_hat) coordinates the
/// grid discretizes. Unstructured and linear models have one pair per arm; the
/// one-armed problem has a single pair driven by arm 1 while arm 2 contributes
/// a constant drift and no state.
struct LimitModel {
  enum class DriftKind { ratio, constant, linear };

  struct ArmDrift {
    DriftKind kind = DriftKind::constant;
    double alpha_hat = 0.0;  // ratio: numerator offset; constant: the value
    double beta_hat = 0.0;   // ratio: denominator offset
  };

  int arms = 0;
  int pairs = 0;
  std::vector<int> arm_pair;  // size arms; -1 for stateless arms
  std::vector<ArmDrift> drift_spec;
  std::vector<double> sigma_hat;  // per arm, constant diffusion

  // Linear-drift block (kind == linear only); shared across arms.
  Eigen::MatrixXd lin_sigma_inv_hat;
  Eigen::VectorXd lin_alpha_hat;
  std::vector<Eigen::VectorXd> lin_actions;

  bool deterministic = true;        // all sigma_hat below 1e-12
  bool denominator_clamped = false; // some beta_hat needed the q floor
  std::optional<ReachEnvelope> envelope;

  static constexpr double kDenominatorFloor = 1e-9;

  double drift(int k, const double* s_hat, const double* q_hat) const;
  double diffusion(int k, const double* /*s_hat*/, const double* /*q_hat*/) const {
    return sigma_hat[static_cast<std::size_t>(k)];
  }
  bool has_linear_drift() const;
};

/// q-dependent factor of the linear drift, hoisted out of s-loops.
struct LinearDriftFactor {
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
};
LinearDriftFactor linear_drift_factor(const LimitModel& model, const double* q_hat);
double linear_drift_eval(const LimitModel& model, const LinearDriftFactor& factor, int k,
                         const double* s_hat);

/// Probe a sequence at (n_probe, 4*n_probe); requires relative agreement
/// within 1e-3 and returns the sqrt(n)-Richardson extrapolate 2g(4n)-g(n),
/// which is exact for sequences with pure n^{-1/2} corrections.
/// Throws DivergentScalingError otherwise.
double probe_limit(const Sequence& g, double n_probe, const std::string& what);

/// Limit model of K Bernoulli arms under a shared Beta(alpha(n), beta(n))
/// prior with payout magnitude gamma(n). The support tag selects the limit
/// map exactly as it selects the posterior map.
LimitModel bernoulli_limit(const Sequence& alpha_n, const Sequence& beta_n,
                           const Sequence& gamma_n, ScalingFactor f, int num_arms,
                           BernoulliSupport support = BernoulliSupport::pm_gamma,
                           double n_probe = 1e6);

/// Limit model of K normal arms with noise sd sigma(n) under a shared
/// N(prior_mean(n), prior_var(n)) prior.
LimitModel normal_limit(const Sequence& prior_mean_n, const Sequence& prior_var_n,
                        const Sequence& sigma_n, ScalingFactor f, int num_arms,
                        double n_probe = 1e6);

/// Limit model of a linear bandit with actions a_k and prior
/// N(prior_mean(n), prior_cov(n)).
LimitModel linear_limit(const std::function<Eigen::VectorXd(double)>& prior_mean_n,
                        const std::function<Eigen::MatrixXd(double)>& prior_cov_n,
                        const Sequence& sigma_n, ScalingFactor f,
                        const std::vector<Eigen::VectorXd>& actions, double n_probe = 1e6);

/// One unknown Bernoulli arm against a known arm paying mu2(n) per round;
/// arm 1 drives the single state pair, arm 2 is the constant drift
/// lim (n/f(n)) mu2(n).
LimitModel one_armed_bernoulli_limit(const Sequence& alpha_n, const Sequence& beta_n,
                                     const Sequence& gamma_n, const Sequence& mu2_n,
                                     ScalingFactor f,
                                     BernoulliSupport support = BernoulliSupport::pm_gamma,
                                     double n_probe = 1e6);

struct RescaledState {
  double t = 0.0;
  std::vector<double> s_hat;
  std::vector<double> q_hat;
};

/// (i, s, q) -> (t, s_hat, q_hat): t = (i-1)/n, s_hat = s/f(n), q_hat = q/n.
RescaledState rescale_state(std::int64_t round, const HistoryState& h, std::int64_t n,
                            ScalingFactor f);

/// Inverse map; integer-valued inputs round-trip through llround.
HistoryState inverse_rescale(const RescaledState& r, std::int64_t n, ScalingFactor f);

/// A parsed limit-model spec file; see docs/formats in the README.
struct ModelSpec {
  std::string family;  // bernoulli | normal | linear | one_armed_bernoulli
  int K = 1;
  int d = 1;  // linear parameter dimension
  ScalingFactor scaling = ScalingFactor::sqrt_n();
  BernoulliSupport support = BernoulliSupport::pm_gamma;
  PowerSeq alpha;       // bernoulli Beta alpha(n)
  PowerSeq beta;        // bernoulli Beta beta(n)
  PowerSeq gamma = PowerSeq::constant(1.0);
  PowerSeq sigma = PowerSeq::constant(1.0);
  PowerSeq mu2;         // one-armed known arm mean sequence
  PowerSeq prior_mean;  // normal prior mean / linear mean scale
  PowerSeq prior_var;   // normal prior variance
  PowerSeq prior_cov = PowerSeq::constant(1.0);  // linear: covariance = coeff * I
  Eigen::VectorXd prior_mean_dir;                // linear: mean = coeff * dir
  std::vector<Eigen::VectorXd> actions;
  double n_probe = 1e6;

  LimitModel build_limit() const;
};

ModelSpec model_spec_from_keyvalues(const KeyValueMap& kv);
ModelSpec model_spec_from_file(const std::string& path);

}  // namespace bhjb
