#pragma once

#include <utility>
#include <vector>

#include "bandit_hjb/env.hpp"
#include "bandit_hjb/types.hpp"

namespace bhjb {

/// Beta posterior after observing cumulative reward s_k over q_k pulls.
/// {0,1} support: (alpha + s, beta + q - s). +-gamma support:
/// (alpha + s/(2 gamma) + q/2, beta - s/(2 gamma) + q/2).
/// Throws InvalidHistoryError if a resulting parameter is not positive.
BetaParams posterior_bernoulli(const BetaParams& prior, double gamma, double s_k,
                               std::int64_t q_k, BernoulliSupport support,
                               int arm = -1);

/// Posterior mean and second moment of a +-gamma Bernoulli arm:
/// mean = gamma (2 alpha/(alpha+beta) - 1), second moment = gamma^2.
std::pair<double, double> posterior_mean_var_bernoulli(const BetaParams& post, double gamma);

/// Posterior success probability of a {0,1} Bernoulli arm.
double posterior_mean_bernoulli01(const BetaParams& post);

/// Normal-mean posterior with known noise sd sigma:
/// mean' = (mean/var + s/sigma^2) / (q/sigma^2 + 1/var), var' = 1/(q/sigma^2 + 1/var).
NormalParams posterior_normal(const NormalParams& prior, double sigma, double s_k,
                              std::int64_t q_k);

/// Gaussian posterior over the linear parameter:
/// cov' = (cov^-1 + sigma^-2 sum_k q_k a_k a_k^T)^-1,
/// mean' = cov' (cov^-1 mean + sigma^-2 sum_k s_k a_k).
/// Factorization-based solves throughout; dimension capped at 8.
GaussianVecParams posterior_linear(const GaussianVecParams& prior, double sigma,
                                   const std::vector<Eigen::VectorXd>& actions,
                                   const std::vector<double>& s,
                                   const std::vector<std::int64_t>& q);

/// Per-arm Beta posteriors for a Bernoulli environment under a shared prior.
std::vector<BetaParams> posteriors_bernoulli(const BetaParams& prior, double gamma,
                                             BernoulliSupport support, const HistoryState& h);

/// Per-arm normal posteriors under a shared prior.
std::vector<NormalParams> posteriors_normal(const NormalParams& prior, double sigma,
                                            const HistoryState& h);

}  // namespace bhjb
