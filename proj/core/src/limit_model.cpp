#include "bandit_hjb/limit_model.hpp"

#include <cmath>

#include "bandit_hjb/errors.hpp"

namespace bhjb {
namespace {

constexpr double kSigmaZeroTol = 1e-12;

bool limits_agree(double a, double b) {
  return std::abs(a - b) <= 1e-3 * std::max({1.0, std::abs(a), std::abs(b)});
}

void finalize(LimitModel& model) {
  model.deterministic = true;
  for (double s : model.sigma_hat)
    if (s >= kSigmaZeroTol) model.deterministic = false;
  model.denominator_clamped = false;
  for (const auto& d : model.drift_spec)
    if (d.kind == LimitModel::DriftKind::ratio && d.beta_hat <= LimitModel::kDenominatorFloor)
      model.denominator_clamped = true;
}

}  // namespace

double probe_limit(const Sequence& g, double n_probe, const std::string& what) {
  const double g1 = g(n_probe);
  const double g4 = g(4.0 * n_probe);
  if (!std::isfinite(g1) || !std::isfinite(g4) || !limits_agree(g1, g4)) {
    throw DivergentScalingError(
        "limit probe for " + what + " did not settle (" + std::to_string(g1) + " at n=" +
        std::to_string(n_probe) + " vs " + std::to_string(g4) + " at 4n); the scaling factor is "
        "inconsistent with this prior sequence - try the other of sqrt/linear");
  }
  return 2.0 * g4 - g1;
}

double LimitModel::drift(int k, const double* s_hat, const double* q_hat) const {
  const auto& spec = drift_spec[static_cast<std::size_t>(k)];
  switch (spec.kind) {
    case DriftKind::constant:
      return spec.alpha_hat;
    case DriftKind::ratio: {
      const int p = arm_pair[static_cast<std::size_t>(k)];
      const double den = std::max(spec.beta_hat + q_hat[p], kDenominatorFloor);
      return (spec.alpha_hat + s_hat[p]) / den;
    }
    case DriftKind::linear: {
      const LinearDriftFactor factor = linear_drift_factor(*this, q_hat);
      return linear_drift_eval(*this, factor, k, s_hat);
    }
  }
  return 0.0;
}

bool LimitModel::has_linear_drift() const {
  for (const auto& d : drift_spec)
    if (d.kind == DriftKind::linear) return true;
  return false;
}

LinearDriftFactor linear_drift_factor(const LimitModel& model, const double* q_hat) {
  Eigen::MatrixXd m = model.lin_sigma_inv_hat;
  for (std::size_t k = 0; k < model.lin_actions.size(); ++k)
    m.noalias() += q_hat[k] * model.lin_actions[k] * model.lin_actions[k].transpose();
  LinearDriftFactor factor{Eigen::LDLT<Eigen::MatrixXd>(m)};
  if (factor.ldlt.info() != Eigen::Success)
    throw NumericError("linear drift: singular design system at this q");
  return factor;
}

double linear_drift_eval(const LimitModel& model, const LinearDriftFactor& factor, int k,
                         const double* s_hat) {
  Eigen::VectorXd rhs = model.lin_alpha_hat;
  for (std::size_t j = 0; j < model.lin_actions.size(); ++j)
    rhs.noalias() += s_hat[j] * model.lin_actions[j];
  return model.lin_actions[static_cast<std::size_t>(k)].dot(factor.ldlt.solve(rhs));
}

namespace {

/// Shared pieces of the Bernoulli limit: ratio constants, diffusion, envelope.
LimitModel::ArmDrift bernoulli_ratio(const Sequence& alpha_n, const Sequence& beta_n,
                                     const Sequence& gamma_n, ScalingFactor f,
                                     BernoulliSupport support, double n_probe) {
  LimitModel::ArmDrift d;
  d.kind = LimitModel::DriftKind::ratio;
  if (support == BernoulliSupport::pm_gamma) {
    d.alpha_hat = probe_limit(
        [&](double n) { return gamma_n(n) * (alpha_n(n) - beta_n(n)) / f(n); }, n_probe,
        "gamma*(alpha-beta)/f(n)");
  } else {
    d.alpha_hat = probe_limit([&](double n) { return alpha_n(n) / f(n); }, n_probe,
                              "alpha/f(n)");
  }
  d.beta_hat = probe_limit([&](double n) { return (alpha_n(n) + beta_n(n)) / n; }, n_probe,
                           "(alpha+beta)/n");
  return d;
}

double bernoulli_sigma_hat(const Sequence& alpha_n, const Sequence& beta_n,
                           const Sequence& gamma_n, ScalingFactor f, BernoulliSupport support,
                           double n_probe) {
  if (support == BernoulliSupport::pm_gamma) {
    return probe_limit([&](double n) { return std::sqrt(n) * gamma_n(n) / f(n); }, n_probe,
                       "sqrt(n)*gamma/f(n)");
  }
  // {0,1}: second moment equals the posterior mean; probe at a representative
  // rescaled state (s_hat, q_hat) = (0.5, 1).
  const double var = probe_limit(
      [&](double n) {
        const double mean = (alpha_n(n) + f(n) * 0.5) / (alpha_n(n) + beta_n(n) + n);
        return n / (f(n) * f(n)) * mean;
      },
      n_probe, "n/f(n)^2 * posterior second moment");
  return std::sqrt(std::max(0.0, var));
}

std::optional<ReachEnvelope> bernoulli_envelope(const Sequence& gamma_n, ScalingFactor f,
                                                BernoulliSupport support, double n_probe,
                                                bool deterministic) {
  if (!deterministic) return std::nullopt;  // diffusive excursions are unbounded
  const double slope =
      probe_limit([&](double n) { return (support == BernoulliSupport::zero_one ? 1.0 : gamma_n(n)) * n / f(n); },
                  n_probe, "reward-slope * n/f(n)");
  if (support == BernoulliSupport::zero_one) return ReachEnvelope{0.0, slope};
  return ReachEnvelope{-slope, slope};
}

}  // namespace

LimitModel bernoulli_limit(const Sequence& alpha_n, const Sequence& beta_n,
                           const Sequence& gamma_n, ScalingFactor f, int num_arms,
                           BernoulliSupport support, double n_probe) {
  LimitModel model;
  model.arms = num_arms;
  model.pairs = num_arms;
  const LimitModel::ArmDrift d = bernoulli_ratio(alpha_n, beta_n, gamma_n, f, support, n_probe);
  const double sh = bernoulli_sigma_hat(alpha_n, beta_n, gamma_n, f, support, n_probe);
  for (int k = 0; k < num_arms; ++k) {
    model.arm_pair.push_back(k);
    model.drift_spec.push_back(d);
    model.sigma_hat.push_back(sh);
  }
  finalize(model);
  model.envelope = bernoulli_envelope(gamma_n, f, support, n_probe, model.deterministic);
  return model;
}

LimitModel normal_limit(const Sequence& prior_mean_n, const Sequence& prior_var_n,
                        const Sequence& sigma_n, ScalingFactor f, int num_arms,
                        double n_probe) {
  LimitModel model;
  model.arms = num_arms;
  model.pairs = num_arms;
  LimitModel::ArmDrift d;
  d.kind = LimitModel::DriftKind::ratio;
  d.alpha_hat = probe_limit(
      [&](double n) {
        const double s2 = sigma_n(n) * sigma_n(n);
        return s2 * prior_mean_n(n) / (f(n) * prior_var_n(n));
      },
      n_probe, "sigma^2*mean/(f(n)*var)");
  d.beta_hat = probe_limit(
      [&](double n) {
        const double s2 = sigma_n(n) * sigma_n(n);
        return s2 / (prior_var_n(n) * n);
      },
      n_probe, "sigma^2/(var*n)");
  const double sh =
      probe_limit([&](double n) { return std::sqrt(n) * sigma_n(n) / f(n); }, n_probe,
                  "sqrt(n)*sigma/f(n)");
  for (int k = 0; k < num_arms; ++k) {
    model.arm_pair.push_back(k);
    model.drift_spec.push_back(d);
    model.sigma_hat.push_back(sh);
  }
  finalize(model);
  return model;
}

LimitModel linear_limit(const std::function<Eigen::VectorXd(double)>& prior_mean_n,
                        const std::function<Eigen::MatrixXd(double)>& prior_cov_n,
                        const Sequence& sigma_n, ScalingFactor f,
                        const std::vector<Eigen::VectorXd>& actions, double n_probe) {
  if (actions.empty()) throw ConfigError("linear limit: needs at least one action");
  const Eigen::Index d = actions.front().size();
  if (d > 8) throw ConfigError("linear limit: dimension capped at 8");

  const auto precision_at = [&](double n) -> Eigen::MatrixXd {
    const Eigen::MatrixXd cov = prior_cov_n(n);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw NumericError("linear limit: prior covariance is not positive definite");
    const double s2 = sigma_n(n) * sigma_n(n);
    return s2 * llt.solve(Eigen::MatrixXd::Identity(d, d));
  };

  LimitModel model;
  model.arms = static_cast<int>(actions.size());
  model.pairs = model.arms;
  model.lin_actions = actions;

  // Entrywise probes of sigma^2 Sigma^-1 / n and sigma^2 Sigma^-1 alpha / f(n).
  model.lin_sigma_inv_hat.resize(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c)
      model.lin_sigma_inv_hat(r, c) = probe_limit(
          [&](double n) { return precision_at(n)(r, c) / n; }, n_probe,
          "sigma^2*cov^-1/n entry");
  model.lin_alpha_hat.resize(d);
  for (Eigen::Index r = 0; r < d; ++r)
    model.lin_alpha_hat(r) = probe_limit(
        [&](double n) { return (precision_at(n) * prior_mean_n(n))(r) / f(n); }, n_probe,
        "sigma^2*cov^-1*mean/f(n) entry");

  const double sh =
      probe_limit([&](double n) { return std::sqrt(n) * sigma_n(n) / f(n); }, n_probe,
                  "sqrt(n)*sigma/f(n)");
  for (int k = 0; k < model.arms; ++k) {
    model.arm_pair.push_back(k);
    model.drift_spec.push_back({LimitModel::DriftKind::linear, 0.0, 0.0});
    model.sigma_hat.push_back(sh);
  }
  finalize(model);
  return model;
}

LimitModel one_armed_bernoulli_limit(const Sequence& alpha_n, const Sequence& beta_n,
                                     const Sequence& gamma_n, const Sequence& mu2_n,
                                     ScalingFactor f, BernoulliSupport support,
                                     double n_probe) {
  LimitModel model;
  model.arms = 2;
  model.pairs = 1;
  model.arm_pair = {0, -1};
  model.drift_spec.push_back(bernoulli_ratio(alpha_n, beta_n, gamma_n, f, support, n_probe));
  const double mu2_hat =
      probe_limit([&](double n) { return n / f(n) * mu2_n(n); }, n_probe, "n/f(n)*mu2");
  model.drift_spec.push_back({LimitModel::DriftKind::constant, mu2_hat, 0.0});
  model.sigma_hat = {bernoulli_sigma_hat(alpha_n, beta_n, gamma_n, f, support, n_probe), 0.0};
  finalize(model);
  model.envelope = bernoulli_envelope(gamma_n, f, support, n_probe, model.deterministic);
  return model;
}

RescaledState rescale_state(std::int64_t round, const HistoryState& h, std::int64_t n,
                            ScalingFactor f) {
  const double nn = static_cast<double>(n);
  const double fn = f(nn);
  RescaledState r;
  r.t = static_cast<double>(round - 1) / nn;
  r.s_hat.resize(h.s.size());
  r.q_hat.resize(h.q.size());
  for (std::size_t k = 0; k < h.s.size(); ++k) {
    r.s_hat[k] = h.s[k] / fn;
    r.q_hat[k] = static_cast<double>(h.q[k]) / nn;
  }
  return r;
}

HistoryState inverse_rescale(const RescaledState& r, std::int64_t n, ScalingFactor f) {
  const double nn = static_cast<double>(n);
  const double fn = f(nn);
  HistoryState h(static_cast<int>(r.s_hat.size()));
  h.round = std::llround(r.t * nn) + 1;
  for (std::size_t k = 0; k < r.s_hat.size(); ++k) {
    h.s[k] = r.s_hat[k] * fn;
    h.q[k] = std::llround(r.q_hat[k] * nn);
  }
  return h;
}

ModelSpec model_spec_from_keyvalues(const KeyValueMap& kv) {
  ModelSpec spec;
  spec.family = kv.get_string("family");
  spec.K = static_cast<int>(kv.get_int_or("K", spec.family == "one_armed_bernoulli" ? 2 : 1));
  spec.scaling = ScalingFactor::from_name(kv.get_string_or("scaling", "sqrt"));
  const std::string sup = kv.get_string_or("support", "pm-gamma");
  if (sup == "zero-one")
    spec.support = BernoulliSupport::zero_one;
  else if (sup == "pm-gamma")
    spec.support = BernoulliSupport::pm_gamma;
  else
    throw ConfigError(kv.origin() + ": unknown support '" + sup + "'");
  spec.n_probe = kv.get_double_or("n_probe", 1e6);

  spec.alpha = PowerSeq::from_keyvalues(kv, "alpha");
  spec.beta = PowerSeq::from_keyvalues(kv, "beta");
  spec.gamma = PowerSeq::from_keyvalues(kv, "gamma", PowerSeq::constant(1.0));
  spec.sigma = PowerSeq::from_keyvalues(kv, "sigma", PowerSeq::constant(1.0));
  spec.mu2 = PowerSeq::from_keyvalues(kv, "mu2");
  spec.prior_mean = PowerSeq::from_keyvalues(kv, "prior.mean");
  spec.prior_var = PowerSeq::from_keyvalues(kv, "prior.var", PowerSeq::constant(1.0));
  spec.prior_cov = PowerSeq::from_keyvalues(kv, "prior.cov", PowerSeq::constant(1.0));

  if (spec.family == "linear") {
    spec.d = static_cast<int>(kv.get_int_or("d", 1));
    for (int k = 1; k <= spec.K; ++k) {
      const auto a = kv.get_double_list("action." + std::to_string(k));
      if (static_cast<int>(a.size()) != spec.d)
        throw ConfigError(kv.origin() + ": action." + std::to_string(k) + " has wrong dimension");
      spec.actions.emplace_back(
          Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())));
    }
    if (kv.has("prior.mean.dir")) {
      const auto dir = kv.get_double_list("prior.mean.dir");
      spec.prior_mean_dir =
          Eigen::Map<const Eigen::VectorXd>(dir.data(), static_cast<Eigen::Index>(dir.size()));
    } else {
      spec.prior_mean_dir = Eigen::VectorXd::Ones(spec.d);
    }
  }
  return spec;
}

ModelSpec model_spec_from_file(const std::string& path) {
  return model_spec_from_keyvalues(KeyValueMap::parse_file(path));
}

LimitModel ModelSpec::build_limit() const {
  const Sequence alpha_n = alpha;
  const Sequence beta_n = beta;
  const Sequence gamma_n = gamma;
  const Sequence sigma_n = sigma;
  if (family == "bernoulli")
    return bernoulli_limit(alpha_n, beta_n, gamma_n, scaling, K, support, n_probe);
  if (family == "one_armed_bernoulli")
    return one_armed_bernoulli_limit(alpha_n, beta_n, gamma_n, mu2, scaling, support, n_probe);
  if (family == "normal")
    return normal_limit(prior_mean, prior_var, sigma_n, scaling, K, n_probe);
  if (family == "linear") {
    const Eigen::VectorXd dir = prior_mean_dir;
    const PowerSeq mean_seq = prior_mean;
    const PowerSeq cov_seq = prior_cov;
    const int dim = d;
    return linear_limit(
        [=](double n) -> Eigen::VectorXd { return mean_seq(n) * dir; },
        [=](double n) -> Eigen::MatrixXd {
          return cov_seq(n) * Eigen::MatrixXd::Identity(dim, dim);
        },
        sigma_n, scaling, actions, n_probe);
  }
  throw ConfigError("unknown model family '" + family + "'");
}

}  // namespace bhjb
