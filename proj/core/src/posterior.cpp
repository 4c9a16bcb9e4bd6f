#include "bandit_hjb/posterior.hpp"

#include <Eigen/Cholesky>
#include <string>

#include "bandit_hjb/errors.hpp"

namespace bhjb {

BetaParams posterior_bernoulli(const BetaParams& prior, double gamma, double s_k,
                               std::int64_t q_k, BernoulliSupport support, int arm) {
  BetaParams post;
  const double q = static_cast<double>(q_k);
  // Success-count form: the alpha increment is the (half-)integer number of
  // up-moves, so integer-consistent histories update without rounding drift.
  const double up = support == BernoulliSupport::zero_one ? s_k : s_k / (2.0 * gamma) + 0.5 * q;
  post.alpha = prior.alpha + up;
  post.beta = prior.beta + (q - up);
  if (!(post.alpha > 0.0) || !(post.beta > 0.0)) {
    std::string where = arm >= 0 ? " for arm " + std::to_string(arm + 1) : "";
    throw InvalidHistoryError("history (s=" + std::to_string(s_k) +
                              ", q=" + std::to_string(q_k) +
                              ") yields non-positive Beta parameters" + where);
  }
  return post;
}

std::pair<double, double> posterior_mean_var_bernoulli(const BetaParams& post, double gamma) {
  const double mean = gamma * (2.0 * post.alpha / (post.alpha + post.beta) - 1.0);
  return {mean, gamma * gamma};
}

double posterior_mean_bernoulli01(const BetaParams& post) {
  return post.alpha / (post.alpha + post.beta);
}

NormalParams posterior_normal(const NormalParams& prior, double sigma, double s_k,
                              std::int64_t q_k) {
  const double prior_precision = 1.0 / prior.variance;
  const double noise_precision = 1.0 / (sigma * sigma);
  const double precision = static_cast<double>(q_k) * noise_precision + prior_precision;
  NormalParams post;
  post.variance = 1.0 / precision;
  post.mean = (prior.mean * prior_precision + s_k * noise_precision) / precision;
  return post;
}

GaussianVecParams posterior_linear(const GaussianVecParams& prior, double sigma,
                                   const std::vector<Eigen::VectorXd>& actions,
                                   const std::vector<double>& s,
                                   const std::vector<std::int64_t>& q) {
  const Eigen::Index d = prior.mean.size();
  if (d > 8) throw ConfigError("linear posterior: dimension capped at 8");
  if (actions.size() != s.size() || actions.size() != q.size())
    throw ConfigError("linear posterior: actions/s/q length mismatch");
  for (const auto& a : actions)
    if (a.size() != d) throw ConfigError("linear posterior: action dimension mismatch");
  const double noise_precision = 1.0 / (sigma * sigma);

  if (d == 1) {
    // Scalar information form; coincides with the conjugate normal update
    // (and bit-for-bit so for unit actions).
    if (!(prior.covariance(0, 0) > 0.0))
      throw NumericError("linear posterior: prior covariance is not positive definite");
    const double prior_precision = 1.0 / prior.covariance(0, 0);
    double precision = prior_precision;
    double info = prior.mean(0) * prior_precision;
    for (std::size_t k = 0; k < actions.size(); ++k) {
      const double a = actions[k](0);
      precision += static_cast<double>(q[k]) * noise_precision * (a * a);
      info += s[k] * noise_precision * a;
    }
    if (!(precision > 0.0))
      throw NumericError("linear posterior: accumulated precision is not positive definite");
    GaussianVecParams post;
    post.covariance = Eigen::MatrixXd::Constant(1, 1, 1.0 / precision);
    post.mean = Eigen::VectorXd::Constant(1, info / precision);
    return post;
  }

  Eigen::LLT<Eigen::MatrixXd> prior_llt(prior.covariance);
  if (prior_llt.info() != Eigen::Success)
    throw NumericError("linear posterior: prior covariance is not positive definite");

  // Precision form, never an explicit inverse.
  Eigen::MatrixXd precision = prior_llt.solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::VectorXd info = prior_llt.solve(prior.mean);
  for (std::size_t k = 0; k < actions.size(); ++k) {
    precision.noalias() +=
        noise_precision * static_cast<double>(q[k]) * actions[k] * actions[k].transpose();
    info.noalias() += noise_precision * s[k] * actions[k];
  }

  Eigen::LLT<Eigen::MatrixXd> post_llt(precision);
  if (post_llt.info() != Eigen::Success)
    throw NumericError("linear posterior: accumulated precision is not positive definite");
  GaussianVecParams post;
  post.covariance = post_llt.solve(Eigen::MatrixXd::Identity(d, d));
  post.mean = post_llt.solve(info);
  return post;
}

std::vector<BetaParams> posteriors_bernoulli(const BetaParams& prior, double gamma,
                                             BernoulliSupport support, const HistoryState& h) {
  std::vector<BetaParams> out(h.s.size());
  for (std::size_t k = 0; k < h.s.size(); ++k)
    out[k] = posterior_bernoulli(prior, gamma, h.s[k], h.q[k], support, static_cast<int>(k));
  return out;
}

std::vector<NormalParams> posteriors_normal(const NormalParams& prior, double sigma,
                                            const HistoryState& h) {
  std::vector<NormalParams> out(h.s.size());
  for (std::size_t k = 0; k < h.s.size(); ++k)
    out[k] = posterior_normal(prior, sigma, h.s[k], h.q[k]);
  return out;
}

}  // namespace bhjb
