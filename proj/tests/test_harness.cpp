#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bandit_hjb/episode.hpp>
#include <bandit_hjb/errors.hpp>
#include <bandit_hjb/sweeps.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>

using namespace bhjb;

namespace {

ExperimentConfig normal_cfg(int K, std::int64_t n, std::int64_t sims,
                            std::vector<double> grid) {
  ExperimentConfig cfg;
  cfg.family = "normal";
  cfg.K = K;
  cfg.n = n;
  cfg.sims = sims;
  cfg.sigma = 1.0;
  cfg.param_grid = std::move(grid);
  cfg.prior_mean = PowerSeq{0, 0, 0, 1, 0};  // 1/sqrt(n)
  cfg.prior_var = PowerSeq{0, 0, 0, 0, 1};   // 1/n
  cfg.scaling = ScalingFactor::sqrt_n();
  cfg.seed = 7;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const RegretRow& row_of(const RegretReport& rep, const std::string& policy, double param) {
  for (const auto& r : rep.rows)
    if (r.policy == policy && r.param == doctest::Approx(param)) return r;
  REQUIRE(false);
  return rep.rows.front();
}

}  // namespace

TEST_CASE("episodes") {
  SUBCASE("identical arms give exactly zero pseudo-regret") {
    auto cfg = normal_cfg(3, 50, 1, {0.0});
    const EnvSpec env = cfg.make_env(0.0);
    const auto r = run_episode(cfg.make_policy("ts"), env, 50, 123);
    CHECK(r.regret == 0.0);
  }
  SUBCASE("horizon K forces one pull per arm") {
    auto cfg = normal_cfg(4, 4, 1, {0.5});
    const EnvSpec env = cfg.make_env(0.5);  // means (0, .5, .5, .5)
    const auto r = run_episode(cfg.make_policy("uniform"), env, 4, 9);
    CHECK(r.regret == doctest::Approx(0.5).epsilon(1e-12));  // only arm 1 pays the gap
  }
  SUBCASE("greedy on a deterministic two-arm env pays exactly one gap") {
    for (const double delta : {0.4, -0.4}) {
      ExperimentConfig cfg = normal_cfg(2, 10, 1, {delta});
      cfg.sigma = 1e-12;
      ExperimentConfig greedy_cfg = cfg;
      PolicySpec greedy = greedy_cfg.make_policy("bayes");
      greedy.alpha_hat = {0.0, 0.0};
      greedy.beta_hat = {0.0, 0.0};
      greedy.f = ScalingFactor::linear_n();
      const auto r = run_episode(greedy, cfg.make_env(delta), 10, 5);
      CHECK(r.regret == doctest::Approx(std::abs(delta)).epsilon(1e-9));
    }
  }
  SUBCASE("policy failures carry the round index") {
    auto cfg = normal_cfg(2, 10, 1, {0.1});
    const auto pol = cfg.make_policy("ucb-lin:0.1");  // needs a linear environment
    CHECK_THROWS_WITH_AS((void)run_episode(pol, cfg.make_env(0.1), 10, 1),
                         doctest::Contains("round 1"), std::runtime_error);
  }
  SUBCASE("horizon below K is rejected") {
    auto cfg = normal_cfg(4, 8, 1, {0.0});
    CHECK_THROWS_AS((void)run_episode(cfg.make_policy("ts"), cfg.make_env(0.0), 3, 1),
                    ConfigError);
  }
  SUBCASE("pseudo-regret equals n mu* minus collected means when rewards are noiseless") {
    auto cfg = normal_cfg(3, 60, 1, {0.35});
    cfg.sigma = 1e-12;
    const EnvSpec env = cfg.make_env(0.35);
    for (const char* token : {"ts", "ucb", "uniform", "bayes"}) {
      const auto r = run_episode(cfg.make_policy(token), env, 60, 21);
      CHECK(r.regret ==
            doctest::Approx(60.0 * 0.35 - r.cumulative_reward).epsilon(1e-8));
    }
  }
}

TEST_CASE("zero-gap cells stay within three standard errors for every policy") {
  auto cfg = normal_cfg(3, 100, 200, {0.0});
  for (const char* token : {"bayes", "bayes-reg:1.0", "ts", "ucb", "uniform"}) {
    const auto rep = regret_sweep(cfg, {token});
    const auto& row = rep.rows.front();
    CHECK_FALSE(row.failed);
    CHECK(std::abs(row.mean_regret) <= 3.0 * row.stderr_regret + 1e-12);
  }
}

TEST_CASE("uniform play matches its closed-form expected regret") {
  // mean regret = n * sum_k gap_k / K: 4/5 |delta| n at delta = -1, n/5 at +1
  auto cfg = normal_cfg(5, 400, 300, {-1.0, 1.0});
  const auto rep = regret_sweep(cfg, {"uniform"});
  const auto& minus = row_of(rep, "uniform", -1.0);
  CHECK(minus.mean_regret == doctest::Approx(320.0).epsilon(0.02));
  const auto& plus = row_of(rep, "uniform", 1.0);
  CHECK(plus.mean_regret == doctest::Approx(80.0).epsilon(0.05));
}

TEST_CASE("closed-form policy is no worse than posterior sampling near zero gap") {
  auto cfg = normal_cfg(5, 300, 150, {-0.1, 0.0, 0.1});
  cfg.seed = 11;
  const auto rep = regret_sweep(cfg, {"bayes", "ts", "ucb"});
  for (const double delta : {-0.1, 0.0, 0.1}) {
    const auto& bayes = row_of(rep, "bayes", delta);
    const auto& ts = row_of(rep, "ts", delta);
    const double pooled =
        std::sqrt(bayes.stderr_regret * bayes.stderr_regret + ts.stderr_regret * ts.stderr_regret);
    CHECK(bayes.mean_regret <= ts.mean_regret + 2.0 * pooled);
  }
}

TEST_CASE("regularization does not hurt under a badly centred prior") {
  // prior mean 0.01 sqrt(n) with unit variance, grid-averaged comparison
  auto cfg = normal_cfg(5, 300, 300, {-1.0, -0.5, 0.0, 0.5, 1.0});
  cfg.prior_mean = PowerSeq{0, 0.01, 0, 0, 0};  // 0.01 sqrt(n)
  cfg.prior_var = PowerSeq::constant(1.0);
  cfg.seed = 13;
  const auto rep = regret_sweep(cfg, {"bayes", "bayes-reg:1.0"});
  double reg_avg = 0.0, unreg_avg = 0.0, se2 = 0.0;
  for (const double d : cfg.param_grid) {
    const auto& u = row_of(rep, "bayes", d);
    const auto& r = row_of(rep, "bayes-reg:1.0", d);
    unreg_avg += u.mean_regret;
    reg_avg += r.mean_regret;
    se2 += u.stderr_regret * u.stderr_regret + r.stderr_regret * r.stderr_regret;
  }
  const auto g = static_cast<double>(cfg.param_grid.size());
  reg_avg /= g;
  unreg_avg /= g;
  CHECK(reg_avg <= unreg_avg + 2.0 * std::sqrt(se2) / g);
}

TEST_CASE("linear-bandit sweeps") {
  ExperimentConfig cfg;
  cfg.family = "linear";
  cfg.K = 2;
  cfg.d = 1;
  cfg.n = 60;
  cfg.sims = 60;
  cfg.sigma = 1.0;
  cfg.param_grid = {0.0};
  Eigen::VectorXd a1(1), a2(1);
  a1 << 0.1;
  a2 << -0.1;
  cfg.actions = {a1, a2};
  cfg.prior_mean_dir = Eigen::VectorXd::Ones(1);
  cfg.prior_mean = PowerSeq::constant(0.0);
  cfg.prior_cov = PowerSeq{0, 0, 0, 0, 1};  // 1/n
  cfg.scaling = ScalingFactor::sqrt_n();
  cfg.seed = 3;
  SUBCASE("a zero parameter zeroes every arm's mean and all regret") {
    const auto rep = regret_sweep(cfg, {"ts", "ucb-lin:0.1", "uniform"});
    for (const auto& row : rep.rows) {
      CHECK_FALSE(row.failed);
      CHECK(row.mean_regret == 0.0);
    }
  }
  SUBCASE("the unstructured index policy also runs on linear rewards") {
    const auto rep = regret_sweep(cfg, {"ucb"});
    CHECK_FALSE(rep.rows.front().failed);
  }
  SUBCASE("no closed form is offered for the linear drift") {
    CHECK_THROWS_AS((void)cfg.make_policy("bayes"), ConfigError);
  }
}

TEST_CASE("failed cells are marked and serialized as nan") {
  namespace fs = std::filesystem;
  auto cfg = normal_cfg(2, 20, 5, {0.2});
  const auto rep = regret_sweep(cfg, {"ucb-lin:0.1"});  // linear policy on a normal env
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows.front().failed);
  CHECK(std::isnan(rep.rows.front().mean_regret));
  const auto path = (fs::temp_directory_path() / "bhjb_failed_cell.csv").string();
  emit_csv(rep, path);
  CHECK(slurp(path).find("nan") != std::string::npos);
  fs::remove(path);
}

TEST_CASE("regret csv bytes are identical across reruns and thread counts") {
  namespace fs = std::filesystem;
  auto cfg = normal_cfg(3, 80, 40, {-0.3, 0.0, 0.3});
  const auto p1 = (fs::temp_directory_path() / "bhjb_regret_1.csv").string();
  const auto p2 = (fs::temp_directory_path() / "bhjb_regret_2.csv").string();
  cfg.threads = 1;
  emit_csv(regret_sweep(cfg, {"ts", "bayes", "uniform"}), p1);
  cfg.threads = 7;
  emit_csv(regret_sweep(cfg, {"uniform", "bayes", "ts"}), p2);  // token order is canonicalized
  const std::string b1 = slurp(p1), b2 = slurp(p2);
  CHECK(b1 == b2);
  CHECK(b1.rfind("policy,param,n,sims,mean_regret,stderr,clip_count\n", 0) == 0);
  fs::remove(p1);
  fs::remove(p2);
}

TEST_CASE("csv emission edges") {
  namespace fs = std::filesystem;
  const auto path = (fs::temp_directory_path() / "bhjb_csv_edge.csv").string();
  SUBCASE("empty reports emit the header only") {
    emit_csv(RegretReport{}, path);
    CHECK(slurp(path) == "policy,param,n,sims,mean_regret,stderr,clip_count\n");
    emit_csv(ConvergenceReport{}, path);
    CHECK(slurp(path) == "n,N,f_family,e_pi,e_w\n");
  }
  SUBCASE("one convergence row; closed-form rows have an empty N") {
    ConvergenceReport rep;
    rep.rows.push_back({64, -1, "sqrt", 0.125, 0.25});
    emit_csv(rep, path);
    CHECK(slurp(path) == "n,N,f_family,e_pi,e_w\n64,,sqrt,0.125,0.25\n");
  }
  fs::remove(path);
}

TEST_CASE("closed-form convergence study") {
  SUBCASE("horizon one has a single state with a known gap") {
    // alpha=1, beta=0 at n=1: the unknown arm looks certain (p=1), value 1;
    // the limit value is max(1/2, 1/3) = 1/2
    const auto rep = convergence_exact({1}, ScalingFactor::sqrt_n());
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows.front().e_pi == 0.0);
    CHECK(rep.rows.front().e_w == doctest::Approx(0.5));
  }
  SUBCASE("errors shrink as the horizon doubles, both scalings") {
    for (const auto f : {ScalingFactor::sqrt_n(), ScalingFactor::linear_n()}) {
      const auto rep = convergence_exact({16, 32, 64}, f);
      for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        CHECK(rep.rows[i].e_pi >= 0.0);
        CHECK(rep.rows[i].e_pi <= 1.0);
        CHECK(rep.rows[i].e_w >= 0.0);
        if (i > 0) {
          CHECK(rep.rows[i].e_pi < rep.rows[i - 1].e_pi);
          CHECK(rep.rows[i].e_w < rep.rows[i - 1].e_w);
        }
      }
    }
  }
  SUBCASE("reachable-only averaging also reports finite errors") {
    OneArmedSetup setup = default_convergence_setup();
    setup.reachable_only = true;
    const auto rep = convergence_exact({32}, ScalingFactor::sqrt_n(), setup);
    CHECK(rep.rows.front().e_pi >= 0.0);
    CHECK(rep.rows.front().e_pi <= 1.0);
    CHECK(std::isfinite(rep.rows.front().e_w));
  }
}

TEST_CASE("grid convergence study") {
  SUBCASE("matched mesh with n-linear hyperparameters is exact through the error pipeline") {
    OneArmedSetup setup;
    const auto [alpha, beta] = binomial_exact_grid_hyperparams(0.5, 0.5);
    setup.alpha = alpha;
    setup.beta = beta;
    setup.mu2 = PowerSeq{0, 0, 0, 1.0 / 3.0, 0};
    setup.support = BernoulliSupport::pm_gamma;
    const auto rep = convergence_numeric({40}, {40}, ScalingFactor::sqrt_n(), setup);
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows.front().e_w <= 1e-9);
    CHECK(rep.rows.front().e_pi == 0.0);
  }
  SUBCASE("finer grids do not hurt") {
    const auto rep = convergence_numeric({256}, {32, 128}, ScalingFactor::sqrt_n());
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[1].e_w <= rep.rows[0].e_w + 1e-12);
  }
  SUBCASE("both scalings run and report in-range policies") {
    for (const auto f : {ScalingFactor::sqrt_n(), ScalingFactor::linear_n()}) {
      const auto rep = convergence_numeric({32}, {16}, f);
      CHECK(rep.rows.front().e_pi >= 0.0);
      CHECK(rep.rows.front().e_pi <= 1.0);
      CHECK(std::isfinite(rep.rows.front().e_w));
    }
  }
}

TEST_CASE("experiment configs parse from key=value files") {
  const auto kv = KeyValueMap::parse_string(
      "family=normal\nK=5\nn=1000\nsims=500\nsigma=1.0\n"
      "delta.grid=-0.1,0,0.1\nprior.mean.c_inv_sqrt=1.0\nprior.var.c_inv_n=1.0\n"
      "scaling=sqrt\nseed=42\n");
  const auto cfg = ExperimentConfig::from_keyvalues(kv);
  CHECK(cfg.K == 5);
  CHECK(cfg.n == 1000);
  CHECK(cfg.param_grid.size() == 3);
  CHECK(cfg.prior_mean(1000.0) == doctest::Approx(1.0 / std::sqrt(1000.0)));

  const auto ranged = ExperimentConfig::from_keyvalues(KeyValueMap::parse_string(
      "family=normal\nK=2\nn=100\ndelta.grid=-1:1:21\n"));
  CHECK(ranged.param_grid.size() == 21);
  CHECK(ranged.param_grid.front() == doctest::Approx(-1.0));
  CHECK(ranged.param_grid.back() == doctest::Approx(1.0));
  CHECK(ranged.param_grid[10] == doctest::Approx(0.0));

  CHECK_THROWS_AS(
      (void)ExperimentConfig::from_keyvalues(KeyValueMap::parse_string("family=bernoulli\nn=10\n")),
      ConfigError);
}
