#include "bandit_hjb/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <thread>

#include "bandit_hjb/errors.hpp"
#include "bandit_hjb/exact_dp.hpp"
#include "bandit_hjb/hjb_solver.hpp"

namespace bhjb {
namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<double> parse_grid_values(const KeyValueMap& kv, const std::string& key) {
  const std::string v = kv.get_string(key);
  // lo:hi:count range syntax, otherwise a comma list
  const auto c1 = v.find(':');
  if (c1 != std::string::npos) {
    const auto c2 = v.find(':', c1 + 1);
    if (c2 == std::string::npos)
      throw ConfigError(kv.origin() + ": range syntax is lo:hi:count in key '" + key + "'");
    const double lo = std::stod(v.substr(0, c1));
    const double hi = std::stod(v.substr(c1 + 1, c2 - c1 - 1));
    const long long count = std::stoll(v.substr(c2 + 1));
    if (count < 1) throw ConfigError(kv.origin() + ": grid count must be >= 1 in '" + key + "'");
    std::vector<double> out;
    for (long long i = 0; i < count; ++i)
      out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                               static_cast<double>(count - 1));
    return out;
  }
  return kv.get_double_list(key);
}

void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& fn) {
  int t = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (t < 1) t = 1;
  t = static_cast<int>(std::min<std::int64_t>(t, count));
  if (t <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::int64_t chunk = (count + t - 1) / t;
  for (int w = 0; w < t; ++w) {
    const std::int64_t lo = w * chunk;
    const std::int64_t hi = std::min<std::int64_t>(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

bool state_reachable(std::int64_t m, std::int64_t q, BernoulliSupport support) {
  if (support == BernoulliSupport::zero_one) return m >= 0 && m <= q;
  return std::llabs(m) <= q && ((m - q) % 2 == 0);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_keyvalues(const KeyValueMap& kv) {
  ExperimentConfig cfg;
  cfg.family = kv.get_string("family");
  if (cfg.family != "normal" && cfg.family != "linear" && cfg.family != "bernoulli")
    throw ConfigError(kv.origin() + ": regret sweeps run on family normal, linear or bernoulli");
  cfg.K = static_cast<int>(kv.get_int_or("K", cfg.family == "linear" ? 2 : 2));
  cfg.d = static_cast<int>(kv.get_int_or("d", 1));
  cfg.n = kv.get_int("n");
  cfg.sims = kv.get_int_or("sims", 100);
  if (cfg.sims < 1) throw ConfigError(kv.origin() + ": sims must be >= 1");
  cfg.sigma = kv.get_double_or("sigma", 1.0);
  cfg.mu1 = kv.get_double_or("mu1", 0.0);
  cfg.scaling = ScalingFactor::from_name(kv.get_string_or("scaling", "sqrt"));
  cfg.seed = static_cast<std::uint64_t>(kv.get_int_or("seed", 1));
  cfg.threads = static_cast<int>(kv.get_int_or("threads", 0));
  cfg.ucb_delta = kv.get_double_or("ucb.delta", 0.0);
  cfg.bayes_lambda = kv.get_double_or("bayes.lambda", 1.0);
  cfg.ucb_lin_lambda = kv.get_double_or("ucb-lin.lambda", 0.1);
  cfg.prior_mean = PowerSeq::from_keyvalues(kv, "prior.mean");
  cfg.prior_var = PowerSeq::from_keyvalues(kv, "prior.var", PowerSeq::constant(1.0));
  cfg.prior_cov = PowerSeq::from_keyvalues(kv, "prior.cov", PowerSeq::constant(1.0));

  if (cfg.family == "normal") {
    cfg.param_grid = parse_grid_values(kv, kv.has("delta.grid") ? "delta.grid" : "param.grid");
  } else if (cfg.family == "bernoulli") {
    cfg.param_grid = parse_grid_values(kv, kv.has("nu.grid") ? "nu.grid" : "param.grid");
    cfg.nu_rest = kv.get_double_or("nu.rest", 0.5);
    cfg.gamma = kv.get_double_or("gamma", 1.0);
    const std::string sup = kv.get_string_or("support", "zero-one");
    if (sup == "zero-one")
      cfg.support = BernoulliSupport::zero_one;
    else if (sup == "pm-gamma")
      cfg.support = BernoulliSupport::pm_gamma;
    else
      throw ConfigError(kv.origin() + ": unknown support '" + sup + "'");
    cfg.alpha = PowerSeq::from_keyvalues(kv, "alpha", PowerSeq::constant(1.0));
    cfg.beta = PowerSeq::from_keyvalues(kv, "beta", PowerSeq::constant(1.0));
  } else {
    cfg.param_grid = parse_grid_values(kv, kv.has("nu.grid") ? "nu.grid" : "param.grid");
    if (cfg.d != 1) throw ConfigError(kv.origin() + ": linear sweeps support d = 1");
    for (int k = 1; k <= cfg.K; ++k) {
      const auto a = kv.get_double_list("action." + std::to_string(k));
      if (static_cast<int>(a.size()) != cfg.d)
        throw ConfigError(kv.origin() + ": action." + std::to_string(k) + " has wrong dimension");
      cfg.actions.emplace_back(
          Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())));
    }
    if (kv.has("prior.mean.dir")) {
      const auto dir = kv.get_double_list("prior.mean.dir");
      cfg.prior_mean_dir =
          Eigen::Map<const Eigen::VectorXd>(dir.data(), static_cast<Eigen::Index>(dir.size()));
    } else {
      cfg.prior_mean_dir = Eigen::VectorXd::Ones(cfg.d);
    }
  }
  if (cfg.param_grid.empty()) throw ConfigError(kv.origin() + ": empty parameter grid");
  if (cfg.n < cfg.K) throw ConfigError(kv.origin() + ": n must be at least K");
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  return from_keyvalues(KeyValueMap::parse_file(path));
}

EnvSpec ExperimentConfig::make_env(double param) const {
  if (family == "normal") {
    NormalEnvSpec env;
    env.sigma = sigma;
    env.nu.assign(static_cast<std::size_t>(K), mu1 + param);
    env.nu[0] = mu1;  // param is the gap between arm 1 and the others
    EnvSpec e = env;
    validate(e);
    return e;
  }
  if (family == "bernoulli") {
    BernoulliEnvSpec env;
    env.gamma = gamma;
    env.support = support;
    env.nu.assign(static_cast<std::size_t>(K), nu_rest);
    env.nu[0] = param;  // the swept (unknown) arm
    EnvSpec e = env;
    validate(e);
    return e;
  }
  LinearEnvSpec env;
  env.sigma = sigma;
  env.actions = actions;
  env.nu = Eigen::VectorXd::Constant(1, param);
  EnvSpec e = env;
  validate(e);
  return e;
}

PolicySpec ExperimentConfig::make_policy(const std::string& token) const {
  PolicySpec p;
  p.token = token;
  p.n = n;
  p.f = scaling;
  const double nn = static_cast<double>(n);

  std::string name = token, arg;
  if (const auto colon = token.find(':'); colon != std::string::npos) {
    name = token.substr(0, colon);
    arg = token.substr(colon + 1);
  }

  const auto bind_priors = [&] {
    if (family == "normal") {
      p.normal_prior = NormalParams{prior_mean(nn), prior_var(nn)};
    } else if (family == "bernoulli") {
      p.beta_prior = BetaParams{alpha(nn), beta(nn)};
    } else {
      GaussianVecParams g;
      g.mean = prior_mean(nn) * prior_mean_dir;
      g.covariance = prior_cov(nn) * Eigen::MatrixXd::Identity(d, d);
      p.gauss_prior = g;
    }
  };

  if (name == "bayes" || name == "bayes-reg") {
    if (family == "linear")
      throw ConfigError("policy '" + token +
                        "': no closed form for the linear drift; solve a grid and use "
                        "grid:<dump> instead");
    const LimitModel model =
        family == "normal"
            ? normal_limit(prior_mean, prior_var, [sig = sigma](double) { return sig; },
                           scaling, K)
            : bernoulli_limit(alpha, beta, [g = gamma](double) { return g; }, scaling, K,
                              support);
    p.alpha_hat.assign(static_cast<std::size_t>(K), model.drift_spec[0].alpha_hat);
    p.beta_hat.assign(static_cast<std::size_t>(K), model.drift_spec[0].beta_hat);
    BayesExactKind kind;
    if (name == "bayes-reg") {
      kind.lambda = arg.empty() ? bayes_lambda : std::stod(arg);
      if (kind.lambda <= 0.0) throw ConfigError("policy '" + token + "': lambda must be > 0");
    }
    p.kind = kind;
    return p;
  }
  if (name == "grid") {
    if (arg.empty()) throw ConfigError("policy 'grid' needs grid:<dump-path>");
    GridKind kind;
    kind.value_function = std::make_shared<GridValueFunction>(load_grid(arg));
    p.kind = kind;
    return p;
  }
  if (name == "ts") {
    bind_priors();
    p.kind = ThompsonKind{};
    return p;
  }
  if (name == "ucb") {
    UcbKind kind;
    kind.delta = arg.empty() ? (ucb_delta > 0.0 ? ucb_delta : nn * nn) : std::stod(arg);
    if (kind.delta <= 1.0) throw ConfigError("policy '" + token + "': delta must be > 1");
    p.kind = kind;
    return p;
  }
  if (name == "ucb-lin") {
    UcbLinearKind kind;
    kind.lambda_reg = arg.empty() ? ucb_lin_lambda : std::stod(arg);
    if (kind.lambda_reg <= 0.0) throw ConfigError("policy '" + token + "': lambda must be > 0");
    p.kind = kind;
    return p;
  }
  if (name == "dp") {
    if (arg.empty()) throw ConfigError("policy 'dp' needs dp:<dump-path>");
    DpOracleKind kind;
    kind.table = std::make_shared<DpTable>(load_dp_table(arg));
    p.kind = kind;
    return p;
  }
  if (name == "uniform") {
    p.kind = UniformKind{};
    return p;
  }
  throw ConfigError("unknown policy token '" + token +
                    "' (bayes | bayes-reg:<l> | grid:<dump> | ts | ucb:<d> | ucb-lin:<l> | "
                    "dp:<dump> | uniform)");
}

RegretReport regret_sweep(const ExperimentConfig& cfg,
                          const std::vector<std::string>& policy_tokens) {
  if (policy_tokens.empty()) throw ConfigError("regret sweep: no policies given");
  std::vector<std::string> tokens(policy_tokens);
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  std::vector<double> grid(cfg.param_grid);
  std::sort(grid.begin(), grid.end());

  RegretReport report;
  for (const std::string& token : tokens) {
    const PolicySpec policy = cfg.make_policy(token);
    const std::uint64_t token_hash = fnv1a(token);
    for (std::size_t pi = 0; pi < grid.size(); ++pi) {
      const EnvSpec env = cfg.make_env(grid[pi]);
      std::vector<double> regret(static_cast<std::size_t>(cfg.sims), 0.0);
      std::vector<std::int64_t> clips(static_cast<std::size_t>(cfg.sims), 0);
      std::vector<std::uint8_t> failed(static_cast<std::size_t>(cfg.sims), 0);
      parallel_for(cfg.sims, cfg.threads, [&](std::int64_t e) {
        const std::uint64_t seed = CounterRng::derive_key(
            {cfg.seed, token_hash, static_cast<std::uint64_t>(pi), static_cast<std::uint64_t>(e)});
        try {
          const EpisodeResult r = run_episode(policy, env, cfg.n, seed);
          regret[static_cast<std::size_t>(e)] = r.regret;
          clips[static_cast<std::size_t>(e)] = r.clip_events;
        } catch (const std::exception&) {
          failed[static_cast<std::size_t>(e)] = 1;
        }
      });

      RegretRow row;
      row.policy = token;
      row.param = grid[pi];
      row.n = cfg.n;
      row.sims = cfg.sims;
      for (std::uint8_t f : failed) row.failed |= (f != 0);
      if (row.failed) {
        row.mean_regret = std::numeric_limits<double>::quiet_NaN();
        row.stderr_regret = std::numeric_limits<double>::quiet_NaN();
      } else {
        double sum = 0.0;
        for (double r : regret) sum += r;
        row.mean_regret = sum / static_cast<double>(cfg.sims);
        double ss = 0.0;
        for (double r : regret) ss += (r - row.mean_regret) * (r - row.mean_regret);
        row.stderr_regret = cfg.sims > 1 ? std::sqrt(ss / static_cast<double>(cfg.sims - 1)) /
                                               std::sqrt(static_cast<double>(cfg.sims))
                                         : 0.0;
        for (std::int64_t c : clips) row.clip_count += c;
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

OneArmedSetup default_convergence_setup() {
  OneArmedSetup s;
  s.alpha = PowerSeq{1.0, 0.0, 0.0, 0.0, 0.0};         // n
  s.beta = PowerSeq{1.0, -1.0, 0.0, 0.0, 0.0};         // n - sqrt(n)
  s.gamma = PowerSeq::constant(1.0);                   // +-1 rewards
  s.mu2 = PowerSeq{0.0, 0.0, 0.0, 1.0 / 3.0, 0.0};     // 1/(3 sqrt(n))
  s.support = BernoulliSupport::pm_gamma;
  return s;
}

ConvergenceReport convergence_exact(const std::vector<std::int64_t>& n_list, ScalingFactor f,
                                    const OneArmedSetup& setup) {
  ConvergenceReport report;
  const LimitModel model = one_armed_bernoulli_limit(setup.alpha, setup.beta, setup.gamma,
                                                     setup.mu2, f, setup.support, setup.n_probe);
  const double alpha_hat = model.drift_spec[0].alpha_hat;
  const double beta_hat = model.drift_spec[0].beta_hat;
  const double mu2_hat = model.drift_spec[1].alpha_hat;

  for (const std::int64_t n : n_list) {
    const double nn = static_cast<double>(n);
    const double fn = f(nn);
    const double gamma_n = setup.gamma(nn);
    const BetaParams prior{setup.alpha(nn), setup.beta(nn)};
    const double mu2_n = setup.mu2(nn);
    const double step = setup.support == BernoulliSupport::zero_one ? 1.0 : gamma_n;

    double sum_pi = 0.0, sum_w = 0.0;
    std::int64_t Z = 0;
    sweep_one_armed_bernoulli(
        n, prior, mu2_n, setup.support, gamma_n,
        [&](const DpRoundView& view) {
          const double t = static_cast<double>(view.round - 1) / nn;
          const double horizon_left = 1.0 - t;
          std::int64_t idx = 0;
          for (std::int64_t m = view.layout.m_lo; m < view.layout.m_lo + view.layout.m_count;
               ++m) {
            const double s_hat = step * static_cast<double>(m) / fn;
            for (std::int64_t q = 0; q < view.layout.q_count; ++q, ++idx) {
              if (setup.reachable_only && !state_reachable(m, q, setup.support)) continue;
              const double q_hat = static_cast<double>(q) / nn;
              const double den = std::max(beta_hat + q_hat, LimitModel::kDenominatorFloor);
              const double mu = (alpha_hat + s_hat) / den;
              const int cf_arm = mu >= mu2_hat ? 0 : 1;
              const double v = horizon_left * std::max(mu, mu2_hat);
              sum_pi += (view.actions[static_cast<std::size_t>(idx)] != cf_arm) ? 1.0 : 0.0;
              sum_w += std::abs(view.values[static_cast<std::size_t>(idx)] / fn - v);
              ++Z;
            }
          }
        });
    report.rows.push_back(
        {n, -1, f.name(), sum_pi / static_cast<double>(Z), sum_w / static_cast<double>(Z)});
  }
  return report;
}

namespace {

struct StreamedGrid {
  std::unique_ptr<HjbSweeper> sweep;
  std::vector<std::int64_t> l_of_round;   // round -> slice
  std::vector<std::int64_t> idx_of_m;     // m + (n-1) -> s index
  std::vector<std::int64_t> idx_of_q;     // q -> q index
  double sum_pi = 0.0, sum_w = 0.0;
};

}  // namespace

ConvergenceReport convergence_numeric(const std::vector<std::int64_t>& n_list,
                                      const std::vector<int>& N_list, ScalingFactor f,
                                      const OneArmedSetup& setup) {
  ConvergenceReport report;
  const LimitModel model = one_armed_bernoulli_limit(setup.alpha, setup.beta, setup.gamma,
                                                     setup.mu2, f, setup.support, setup.n_probe);
  const bool sqrt_scaling = f.family == ScalingFactor::Family::sqrt_n;
  if (sqrt_scaling && model.deterministic)
    throw ConfigError("numeric study: sqrt scaling should give a diffusive model here");

  for (const std::int64_t n : n_list) {
    const double nn = static_cast<double>(n);
    const double fn = f(nn);
    const double gamma_n = setup.gamma(nn);
    const double step = setup.support == BernoulliSupport::zero_one ? 1.0 : gamma_n;
    const double rescale_w = sqrt_scaling ? 1.0 / std::sqrt(nn) : 1.0;
    const BetaParams prior{setup.alpha(nn), setup.beta(nn)};
    const double mu2_n = setup.mu2(nn);
    const std::int64_t m_min = setup.support == BernoulliSupport::zero_one ? 0 : -(n - 1);

    std::vector<StreamedGrid> grids;
    for (const int N : N_list) {
      StreamedGrid g;
      const double dt = 1.0 / N;
      const double ds = sqrt_scaling ? 1.0 / std::sqrt(static_cast<double>(N)) : 1.0 / N;
      const double s_max = step * static_cast<double>(n - 1) / fn;
      const int N_s = std::max(1, static_cast<int>(std::ceil(s_max / ds - 1e-9)));
      GridSpec spec;
      spec.N_t = N;
      spec.N_q = N;
      spec.N_s = N_s;
      spec.S = N_s * ds;
      g.sweep = std::make_unique<HjbSweeper>(
          model, spec, model.deterministic ? Scheme::deterministic : Scheme::diffusive, 0.0);
      g.l_of_round.resize(static_cast<std::size_t>(n + 1));
      for (std::int64_t i = 1; i <= n; ++i)
        g.l_of_round[static_cast<std::size_t>(i)] =
            std::min<std::int64_t>(floor_index((static_cast<double>(i - 1) / nn) / dt), N - 1);
      g.idx_of_m.resize(static_cast<std::size_t>(2 * n - 1 + 1));
      for (std::int64_t m = m_min; m <= n - 1; ++m) {
        std::int64_t im = floor_index((step * static_cast<double>(m) / fn) / ds);
        im = std::clamp<std::int64_t>(im, -N_s, N_s);
        g.idx_of_m[static_cast<std::size_t>(m - m_min)] = im;
      }
      g.idx_of_q.resize(static_cast<std::size_t>(n));
      for (std::int64_t q = 0; q < n; ++q)
        g.idx_of_q[static_cast<std::size_t>(q)] =
            std::min<std::int64_t>(floor_index((static_cast<double>(q) / nn) / (1.0 / N)), N);
      grids.push_back(std::move(g));
    }

    std::int64_t Z = 0;
    sweep_one_armed_bernoulli(
        n, prior, mu2_n, setup.support, gamma_n,
        [&](const DpRoundView& view) {
          for (auto& g : grids) {
            const std::int64_t l = g.l_of_round[static_cast<std::size_t>(view.round)];
            while (g.sweep->slice() > l) g.sweep->step();
            const std::int64_t Ls = 2 * g.sweep->grid().N_s + 1;
            const double* gv = g.sweep->values().data();
            const std::uint8_t* ga = g.sweep->greedy().data();
            std::int64_t idx = 0;
            for (std::int64_t m = view.layout.m_lo; m < view.layout.m_lo + view.layout.m_count;
                 ++m) {
              const std::int64_t im =
                  g.idx_of_m[static_cast<std::size_t>(m - m_min)] + g.sweep->grid().N_s;
              for (std::int64_t q = 0; q < view.layout.q_count; ++q, ++idx) {
                if (setup.reachable_only && !state_reachable(m, q, setup.support)) continue;
                const std::int64_t node =
                    g.idx_of_q[static_cast<std::size_t>(q)] * Ls + im;
                g.sum_pi +=
                    (view.actions[static_cast<std::size_t>(idx)] != ga[node]) ? 1.0 : 0.0;
                g.sum_w += std::abs(view.values[static_cast<std::size_t>(idx)] / fn - gv[node]) *
                           rescale_w;
              }
            }
          }
          // shared term count across grids; reachable states per round are
          // q+1 choices of m for each q, i.e. i(i+1)/2
          Z += setup.reachable_only ? view.round * (view.round + 1) / 2
                                    : view.layout.m_count * view.layout.q_count;
        });

    for (std::size_t gi = 0; gi < grids.size(); ++gi)
      report.rows.push_back({n, N_list[gi], f.name(), grids[gi].sum_pi / static_cast<double>(Z),
                             grids[gi].sum_w / static_cast<double>(Z)});
  }
  return report;
}

double max_grid_dp_gap(std::int64_t n, ScalingFactor f, const OneArmedSetup& setup) {
  const LimitModel model = one_armed_bernoulli_limit(setup.alpha, setup.beta, setup.gamma,
                                                     setup.mu2, f, setup.support, setup.n_probe);
  const double nn = static_cast<double>(n);
  const double fn = f(nn);
  const double gamma_n = setup.gamma(nn);
  const bool sqrt_scaling = f.family == ScalingFactor::Family::sqrt_n;
  GridSpec spec;
  spec.N_t = static_cast<int>(n);
  spec.N_q = static_cast<int>(n);
  if (sqrt_scaling) {
    spec.N_s = static_cast<int>(n - 1);          // ds = gamma/sqrt(n) covers |m| <= n-1
    spec.S = spec.N_s * (gamma_n / std::sqrt(nn));
  } else {
    spec.N_s = static_cast<int>(n);              // ds = 1/n, S = 1
    spec.S = 1.0;
  }
  HjbSweeper sweep(model, spec, model.deterministic ? Scheme::deterministic : Scheme::diffusive);

  double worst = 0.0;
  sweep_one_armed_bernoulli(
      n, BetaParams{setup.alpha(nn), setup.beta(nn)}, setup.mu2(nn), setup.support, gamma_n,
      [&](const DpRoundView& view) {
        while (sweep.slice() > view.round - 1) sweep.step();
        const std::int64_t Ls = 2 * spec.N_s + 1;
        const double* gv = sweep.values().data();
        std::int64_t idx = 0;
        for (std::int64_t m = view.layout.m_lo; m < view.layout.m_lo + view.layout.m_count; ++m)
          for (std::int64_t q = 0; q < view.layout.q_count; ++q, ++idx) {
            const std::int64_t node = q * Ls + (m + spec.N_s);
            worst = std::max(worst, std::abs(view.values[static_cast<std::size_t>(idx)] / fn -
                                             gv[static_cast<std::size_t>(node)]));
          }
      });
  return worst;
}

std::pair<PowerSeq, PowerSeq> binomial_exact_grid_hyperparams(double c1, double c2,
                                                              bool unbalanced_variant) {
  PowerSeq alpha{c1, c2, 0.0, 0.0, 0.0};
  PowerSeq beta = unbalanced_variant ? PowerSeq{0.0, -c2, c1, 0.0, 0.0}
                                     : PowerSeq{c1, -c2, 0.0, 0.0, 0.0};
  return {alpha, beta};
}

void emit_csv(const RegretReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("csv: cannot open " + path);
  out << "policy,param,n,sims,mean_regret,stderr,clip_count\n";
  char buf[160];
  for (const RegretRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%s,%.12g,%lld,%lld,%.12g,%.12g,%lld\n", r.policy.c_str(),
                  r.param, static_cast<long long>(r.n), static_cast<long long>(r.sims),
                  r.mean_regret, r.stderr_regret, static_cast<long long>(r.clip_count));
    out << buf;
  }
}

void emit_csv(const ConvergenceReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("csv: cannot open " + path);
  out << "n,N,f_family,e_pi,e_w\n";
  char buf[160];
  for (const ConvergenceRow& r : report.rows) {
    if (r.N >= 0)
      std::snprintf(buf, sizeof buf, "%lld,%lld,%s,%.12g,%.12g\n", static_cast<long long>(r.n),
                    static_cast<long long>(r.N), r.f_family.c_str(), r.e_pi, r.e_w);
    else
      std::snprintf(buf, sizeof buf, "%lld,,%s,%.12g,%.12g\n", static_cast<long long>(r.n),
                    r.f_family.c_str(), r.e_pi, r.e_w);
    out << buf;
  }
}

}  // namespace bhjb
