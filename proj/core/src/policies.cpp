#include "bandit_hjb/policies.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "bandit_hjb/errors.hpp"

namespace bhjb {
namespace {

std::vector<double> bayes_indices(const HistoryState& h, std::int64_t n, ScalingFactor f,
                                  const std::vector<double>& alpha_hat,
                                  const std::vector<double>& beta_hat) {
  const double fn = f(static_cast<double>(n));
  std::vector<double> idx(h.s.size());
  for (std::size_t k = 0; k < h.s.size(); ++k) {
    const double den = static_cast<double>(h.q[k]) + static_cast<double>(n) * beta_hat[k];
    if (!(den > 0.0))
      throw RequiresInitializationError(
          "closed-form policy index has non-positive denominator for arm " +
          std::to_string(k + 1) + "; pull every arm once before consulting it");
    idx[k] = (h.s[k] + fn * alpha_hat[k]) / den;
  }
  return idx;
}

}  // namespace

PolicyDistribution exact_unregularized(const HistoryState& h, std::int64_t n, ScalingFactor f,
                                       const std::vector<double>& alpha_hat,
                                       const std::vector<double>& beta_hat) {
  const auto idx = bayes_indices(h, n, f, alpha_hat, beta_hat);
  int best = 0;
  for (std::size_t k = 1; k < idx.size(); ++k)
    if (idx[k] > idx[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  PolicyDistribution d;
  d.weights.assign(idx.size(), 0.0);
  d.weights[static_cast<std::size_t>(best)] = 1.0;
  return d;
}

PolicyDistribution exact_regularized(const HistoryState& h, std::int64_t n, ScalingFactor f,
                                     const std::vector<double>& alpha_hat,
                                     const std::vector<double>& beta_hat, double lambda) {
  if (lambda <= 0.0) throw ConfigError("softmax policy: lambda must be positive");
  const auto idx = bayes_indices(h, n, f, alpha_hat, beta_hat);
  const double scale = static_cast<double>(n) / (lambda * f(static_cast<double>(n)));
  double m = -std::numeric_limits<double>::infinity();
  for (double x : idx) m = std::max(m, scale * x);
  PolicyDistribution d;
  d.weights.resize(idx.size());
  double z = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    d.weights[k] = std::exp(scale * idx[k] - m);
    z += d.weights[k];
  }
  for (double& w : d.weights) w /= z;
  return d;
}

double closed_form_value(const LimitModel& model, double t, const double* s_hat,
                         const double* q_hat) {
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < model.arms; ++k) best = std::max(best, model.drift(k, s_hat, q_hat));
  return (1.0 - t) * best;
}

int closed_form_policy(const LimitModel& model, const double* s_hat, const double* q_hat) {
  int best = 0;
  double best_mu = model.drift(0, s_hat, q_hat);
  for (int k = 1; k < model.arms; ++k) {
    const double mu = model.drift(k, s_hat, q_hat);
    if (mu > best_mu) {
      best_mu = mu;
      best = k;
    }
  }
  return best;
}

GridPolicyResult grid_policy(const HistoryState& h, std::int64_t round,
                             const GridValueFunction& v, std::int64_t n, ScalingFactor f) {
  const RescaledState r = rescale_state(round, h, n, f);
  std::vector<double> s_pair(static_cast<std::size_t>(v.pairs), 0.0);
  std::vector<double> q_pair(static_cast<std::size_t>(v.pairs), 0.0);
  for (int k = 0; k < v.arms; ++k) {
    const int p = v.arm_pair[static_cast<std::size_t>(k)];
    if (p < 0) continue;
    s_pair[static_cast<std::size_t>(p)] = r.s_hat[static_cast<std::size_t>(k)];
    q_pair[static_cast<std::size_t>(p)] = r.q_hat[static_cast<std::size_t>(k)];
  }
  const GridLookup res = lookup(v, r.t, s_pair.data(), q_pair.data());
  GridPolicyResult out;
  out.clipped = res.clipped;
  out.dist.weights = res.weights;
  return out;
}

int thompson_beta(const std::vector<BetaParams>& posts, double gamma, BernoulliSupport support,
                  CounterRng& rng) {
  int best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < posts.size(); ++k) {
    const double nu = rng.next_beta(posts[k].alpha, posts[k].beta);
    const double mean =
        support == BernoulliSupport::zero_one ? nu : gamma * (2.0 * nu - 1.0);
    if (mean > best_mean) {
      best_mean = mean;
      best = static_cast<int>(k);
    }
  }
  return best;
}

int thompson_normal(const std::vector<NormalParams>& posts, CounterRng& rng) {
  int best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < posts.size(); ++k) {
    const double nu = posts[k].mean + std::sqrt(posts[k].variance) * rng.next_normal();
    if (nu > best_mean) {
      best_mean = nu;
      best = static_cast<int>(k);
    }
  }
  return best;
}

int ucb_unstructured(const HistoryState& h, double delta) {
  int best = 0;
  double best_idx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < h.s.size(); ++k) {
    if (h.q[k] < 1)
      throw RequiresInitializationError("ucb index undefined for unpulled arm " +
                                        std::to_string(k + 1));
    const double q = static_cast<double>(h.q[k]);
    const double idx = h.s[k] / q + std::sqrt(2.0 * std::log(delta) / q);
    if (idx > best_idx) {
      best_idx = idx;
      best = static_cast<int>(k);
    }
  }
  return best;
}

int thompson_linear(const GaussianVecParams& post, const std::vector<Eigen::VectorXd>& actions,
                    CounterRng& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(post.covariance);
  if (llt.info() != Eigen::Success)
    throw NumericError("linear posterior sampling: covariance is not positive definite");
  Eigen::VectorXd z(post.mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.next_normal();
  const Eigen::VectorXd nu = post.mean + llt.matrixL() * z;
  int best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < actions.size(); ++k) {
    const double mean = actions[k].dot(nu);
    if (mean > best_mean) {
      best_mean = mean;
      best = static_cast<int>(k);
    }
  }
  return best;
}

double ucb_linear_beta(std::int64_t round, std::int64_t n, double lambda_reg) {
  const double nn = static_cast<double>(n);
  return std::sqrt(lambda_reg) +
         std::sqrt(2.0 * std::log(nn * nn) +
                   std::log(1.0 + static_cast<double>(round - 1) / lambda_reg));
}

int ucb_linear(const UcbLinearState& state, std::int64_t round, std::int64_t n,
               const std::vector<Eigen::VectorXd>& actions, double lambda_reg) {
  for (const auto& a : actions)
    if (a.size() != 1)
      throw UnsupportedFamilyError(
          "linear ucb is defined for scalar actions only (d = 1); higher-dimensional design "
          "accumulation is out of scope");
  if (!(state.V > 0.0)) throw ConfigError("linear ucb: V must be positive");
  const double beta = ucb_linear_beta(round, n, lambda_reg);
  int best = 0;
  double best_idx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < actions.size(); ++k) {
    const double a = actions[k](0);
    const double idx = a * state.nu_hat + beta * std::sqrt(a * a / state.V);
    if (idx > best_idx) {
      best_idx = idx;
      best = static_cast<int>(k);
    }
  }
  return best;
}

}  // namespace bhjb
