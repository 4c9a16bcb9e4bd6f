#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bandit_hjb/errors.hpp>
#include <bandit_hjb/hjb_solver.hpp>
#include <bandit_hjb/sweeps.hpp>
#include <cmath>
#include <filesystem>

using namespace bhjb;

namespace {

/// Hand-built model: two arms with constant drifts on their own state pairs.
LimitModel constant_drift_model(double c1, double c2, double sigma) {
  LimitModel m;
  m.arms = 2;
  m.pairs = 2;
  m.arm_pair = {0, 1};
  m.drift_spec = {{LimitModel::DriftKind::constant, c1, 0.0},
                  {LimitModel::DriftKind::constant, c2, 0.0}};
  m.sigma_hat = {sigma, sigma};
  m.deterministic = sigma < 1e-12;
  return m;
}

Sequence seq(PowerSeq s) {
  return [s](double n) { return s(n); };
}

OneArmedSetup balanced_pm_setup(double c1, double c2, bool unbalanced = false) {
  OneArmedSetup s;
  const auto [alpha, beta] = binomial_exact_grid_hyperparams(c1, c2, unbalanced);
  s.alpha = alpha;
  s.beta = beta;
  s.gamma = PowerSeq::constant(1.0);
  s.mu2 = PowerSeq{0, 0, 0, 1.0 / 3.0, 0};  // 1/(3 sqrt n): exact drift at every n
  s.support = BernoulliSupport::pm_gamma;
  return s;
}

OneArmedSetup zero_one_setup(double mu2) {
  OneArmedSetup s;
  s.alpha = PowerSeq{0.5, 0, 0, 0, 0};
  s.beta = PowerSeq{0.5, 0, 0, 0, 0};
  s.gamma = PowerSeq::constant(1.0);
  s.mu2 = PowerSeq::constant(mu2);
  s.support = BernoulliSupport::zero_one;
  return s;
}

}  // namespace

TEST_CASE("terminal slice is zero and one step back picks the best constant drift") {
  SUBCASE("diffusive") {
    const auto m = constant_drift_model(0.3, 0.7, 1.0);
    const auto g = GridSpec::make(16, 4, 1.0);  // dt = 1/16 = ds^2/sigma^2
    const auto v = solve_diffusive(m, g);
    for (double x : v.values.back()) CHECK(x == 0.0);
    // interior node of the N_t-1 slice
    const std::int64_t i[2] = {0, 0}, j[2] = {3, 3};
    const auto idx = static_cast<std::size_t>(v.node_index(i, j));
    CHECK(v.values[static_cast<std::size_t>(g.N_t - 1)][idx] ==
          doctest::Approx(g.dt() * 0.7).epsilon(1e-12));
    CHECK(v.greedy[static_cast<std::size_t>(g.N_t - 1)][idx] == 1);
  }
  SUBCASE("deterministic upwind") {
    const auto m = constant_drift_model(0.4, 0.1, 0.0);
    const auto g = GridSpec::make(10, 10, 1.0);  // sup|mu| dt <= ds
    const auto v = solve_deterministic(m, g);
    for (double x : v.values.back()) CHECK(x == 0.0);
    const std::int64_t i[2] = {1, -2}, j[2] = {5, 2};
    const auto idx = static_cast<std::size_t>(v.node_index(i, j));
    CHECK(v.values[static_cast<std::size_t>(g.N_t - 1)][idx] ==
          doctest::Approx(g.dt() * 0.4).epsilon(1e-12));
    CHECK(v.greedy[static_cast<std::size_t>(g.N_t - 1)][idx] == 0);
  }
  SUBCASE("zero drift everywhere keeps every slice at zero") {
    const auto m = constant_drift_model(0.0, 0.0, 0.0);
    const auto v = solve_deterministic(m, GridSpec::make(8, 4, 1.0));
    for (const auto& slice : v.values)
      for (double x : slice) CHECK(x == 0.0);
  }
}

TEST_CASE("upwind solve reproduces backward induction for n-linear {0,1} hyperparameters") {
  for (const double mu2 : {0.4, 0.6}) {
    const double gap = max_grid_dp_gap(50, ScalingFactor::linear_n(), zero_one_setup(mu2));
    CHECK(gap <= 1e-9);
  }
}

TEST_CASE("diffusive solve reproduces backward induction for balanced binomial hyperparameters") {
  const double gap = max_grid_dp_gap(40, ScalingFactor::sqrt_n(), balanced_pm_setup(0.5, 0.5));
  CHECK(gap <= 1e-9);

  // the unbalanced variant (beta without the n term) has no finite limit
  // constants at all: the probe rejects it
  OneArmedSetup unbalanced = balanced_pm_setup(1.0, -0.1, true);
  CHECK_THROWS_AS((void)max_grid_dp_gap(40, ScalingFactor::sqrt_n(), unbalanced),
                  DivergentScalingError);
}

TEST_CASE("stability refusals") {
  SUBCASE("diffusive mesh too coarse in time") {
    const auto m = constant_drift_model(0.1, 0.2, 1.0);
    GridSpec g = GridSpec::make(8, 4, 1.0);  // dt = 1/8 > ds^2 = 1/16
    try {
      (void)solve_diffusive(m, g);
      FAIL("expected a stability refusal");
    } catch (const StabilityError& e) {
      CHECK(e.suggested_dt == doctest::Approx(1.0 / 16.0));
      CHECK(std::string(e.what()).find("ds^2") != std::string::npos);
    }
  }
  SUBCASE("upwind transport faster than the mesh") {
    const auto m = constant_drift_model(2.0, 0.0, 0.0);
    GridSpec g = GridSpec::make(10, 10, 1.0);  // sup|mu| dt = 0.2 > ds = 0.1
    try {
      (void)solve_deterministic(m, g);
      FAIL("expected a stability refusal");
    } catch (const StabilityError& e) {
      CHECK(e.suggested_dt == doctest::Approx(0.05));
    }
  }
  SUBCASE("scheme/model mismatch") {
    CHECK_THROWS_AS((void)solve_deterministic(constant_drift_model(0, 0, 1.0),
                                              GridSpec::make(4, 2, 1.0)),
                    ConfigError);
    CHECK_THROWS_AS(
        (void)solve_diffusive(constant_drift_model(0, 0, 0.0), GridSpec::make(4, 2, 1.0)),
        ConfigError);
  }
  SUBCASE("reachable envelope admits the matched {0,1} mesh") {
    // without the envelope the rectangle corner (s=1, q=0) would violate the
    // transport condition: mu = 1.5 there but only 1 is reachable
    const auto m = bernoulli_limit(seq({0.5, 0, 0, 0, 0}), seq({0.5, 0, 0, 0, 0}),
                                   seq(PowerSeq::constant(1.0)), ScalingFactor::linear_n(), 1,
                                   BernoulliSupport::zero_one);
    REQUIRE(m.envelope.has_value());
    const int n = 32;
    CHECK_NOTHROW((void)HjbSweeper(m, GridSpec::make(n, n, 1.0), Scheme::deterministic));
    LimitModel no_env = m;
    no_env.envelope.reset();
    CHECK_THROWS_AS((void)HjbSweeper(no_env, GridSpec::make(n, n, 1.0), Scheme::deterministic),
                    StabilityError);
  }
}

TEST_CASE("regularized solves") {
  const auto m = constant_drift_model(0.2, 0.5, 1.0);
  const auto g = GridSpec::make(16, 4, 1.0);
  SUBCASE("tiny lambda matches the unregularized values") {
    const auto v0 = solve_diffusive(m, g);
    const auto vr = solve_regularized(m, g, 1e-8);
    for (std::size_t l = 0; l < v0.values.size(); ++l)
      for (std::size_t i = 0; i < v0.values[l].size(); ++i)
        CHECK(vr.values[l][i] == doctest::Approx(v0.values[l][i]).epsilon(1e-5));
  }
  SUBCASE("regularized value dominates the unregularized one") {
    const auto v0 = solve_diffusive(m, g);
    const auto vr = solve_regularized(m, g, 0.5);
    for (std::size_t l = 0; l < v0.values.size(); ++l)
      for (std::size_t i = 0; i < v0.values[l].size(); ++i)
        CHECK(vr.values[l][i] >= v0.values[l][i] - 1e-10);
  }
  SUBCASE("symmetric arms get equal weights") {
    const auto sym = constant_drift_model(0.3, 0.3, 1.0);
    const auto vr = solve_regularized(sym, g, 0.7);
    const std::int64_t i[2] = {0, 0}, j[2] = {2, 2};
    const auto idx = static_cast<std::size_t>(vr.node_index(i, j));
    for (int l : {0, 8, 15}) {
      const double* w =
          vr.weights[static_cast<std::size_t>(l)].data() + 2 * idx;
      CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
  SUBCASE("lambda must be positive") {
    CHECK_THROWS_AS((void)solve_regularized(m, g, 0.0), ConfigError);
  }
}

TEST_CASE("stencil recheck at sampled interior nodes") {
  CounterRng rng(41);
  const auto m = one_armed_bernoulli_limit(seq({1, 0, 0, 0, 0}), seq({1, -1, 0, 0, 0}),
                                           seq(PowerSeq::constant(1.0)),
                                           seq({0, 0, 0, 1.0 / 3.0, 0}), ScalingFactor::sqrt_n());
  GridSpec g;
  g.N_t = 64;
  g.N_q = 64;
  g.N_s = 32;
  g.S = 32.0 / 8.0;  // ds = 1/8, dt = 1/64 = ds^2
  const auto v = solve_diffusive(m, g);
  CHECK(verify_stencil(v, m, 1000, rng) <= 1e-12);

  const auto vr = solve_regularized(m, g, 0.3);
  CHECK(verify_stencil(vr, m, 1000, rng) <= 1e-12);

  const auto det = constant_drift_model(0.4, 0.1, 0.0);
  const auto vd = solve_deterministic(det, GridSpec::make(10, 10, 1.0));
  CHECK(verify_stencil(vd, det, 500, rng) <= 1e-12);
}

TEST_CASE("values grow backward in time when all drifts are non-negative") {
  LimitModel m;
  m.arms = 1;
  m.pairs = 1;
  m.arm_pair = {0};
  m.drift_spec = {{LimitModel::DriftKind::ratio, 2.0, 1.0}};  // (2+s)/(1+q) > 0 for |s| <= 1
  m.sigma_hat = {1.0};
  m.deterministic = false;
  GridSpec g;
  g.N_t = 100;
  g.N_q = 100;
  g.N_s = 10;
  g.S = 1.0;  // ds = 0.1, dt = 0.01 = ds^2
  const auto v = solve_diffusive(m, g);
  for (int l = 0; l < g.N_t; ++l)
    for (std::size_t i = 0; i < v.values[static_cast<std::size_t>(l)].size(); ++i)
      CHECK(v.values[static_cast<std::size_t>(l)][i] >=
            v.values[static_cast<std::size_t>(l + 1)][i] - 1e-12);
}

TEST_CASE("floor lookup semantics") {
  const auto m = constant_drift_model(0.1, 0.6, 1.0);
  GridSpec g = GridSpec::make(2, 2, 1.0);  // dt = 0.5, ds = 0.5, stable: dt <= ds^2? 0.5 > 0.25
  g.N_t = 4;                               // dt = 0.25 = ds^2
  g.N_q = 4;
  const auto v = solve_diffusive(m, g);
  SUBCASE("exact nodes return their own value") {
    const std::int64_t i[2] = {1, -1}, j[2] = {2, 1};
    const double s[2] = {0.5, -0.5}, q[2] = {0.5, 0.25};
    const auto idx = static_cast<std::size_t>(v.node_index(i, j));
    const auto r = lookup(v, 0.25, s, q);
    CHECK(r.value == v.values[1][idx]);
    CHECK_FALSE(r.clipped);
    CHECK(r.weights[r.greedy_arm] == 1.0);
  }
  SUBCASE("terminal time gives zero") {
    const double s[2] = {0.1, 0.2}, q[2] = {0.9, 0.1};
    CHECK(lookup(v, 1.0, s, q).value == 0.0);
  }
  SUBCASE("floor picks the earlier slice") {
    const double s[2] = {0.0, 0.0}, q[2] = {0.0, 0.0};
    // t = 0.55 with dt = 0.5 lands on slice 1
    GridSpec g2 = GridSpec::make(2, 2, 1.0);
    LimitModel det = constant_drift_model(0.1, 0.2, 0.0);
    const auto vd = solve_deterministic(det, g2);
    const auto r = lookup(vd, 0.55, s, q);
    CHECK(r.value == vd.values[1][static_cast<std::size_t>(vd.node_index(
                         std::array<std::int64_t, 2>{0, 0}.data(),
                         std::array<std::int64_t, 2>{0, 0}.data()))]);
  }
  SUBCASE("out-of-range s clips and reports") {
    const double s[2] = {5.0, 0.0}, q[2] = {0.0, 0.0};
    CHECK(lookup(v, 0.0, s, q).clipped);
    const double s2[2] = {-5.0, 0.0};
    CHECK(lookup(v, 0.0, s2, q).clipped);
  }
}

TEST_CASE("grid dump/load round trip") {
  namespace fs = std::filesystem;
  const auto m = one_armed_bernoulli_limit(seq({1, 0, 0, 0, 0}), seq({1, -1, 0, 0, 0}),
                                           seq(PowerSeq::constant(1.0)),
                                           seq({0, 0, 0, 1.0 / 3.0, 0}), ScalingFactor::sqrt_n());
  GridSpec g;
  g.N_t = 16;
  g.N_q = 16;
  g.N_s = 8;
  g.S = 2.0;  // ds = 0.25, dt = 1/16 = ds^2
  SUBCASE("greedy dump") {
    const auto v = solve_diffusive(m, g);
    const auto path = (fs::temp_directory_path() / "bhjb_grid_dump.txt").string();
    dump_grid(v, path);
    const auto back = load_grid(path);
    CHECK(back.arms == v.arms);
    CHECK(back.pairs == v.pairs);
    CHECK(back.arm_pair == v.arm_pair);
    for (std::size_t l = 0; l < v.values.size(); ++l) {
      CHECK(back.values[l] == v.values[l]);
      CHECK(back.greedy[l] == v.greedy[l]);
    }
    fs::remove(path);
  }
  SUBCASE("softmax dump") {
    const auto v = solve_regularized(m, g, 0.4);
    const auto path = (fs::temp_directory_path() / "bhjb_grid_dump_reg.txt").string();
    dump_grid(v, path);
    const auto back = load_grid(path);
    for (std::size_t l = 0; l < v.values.size(); ++l) {
      CHECK(back.values[l] == v.values[l]);
      CHECK(back.weights[l] == v.weights[l]);
    }
    fs::remove(path);
  }
}

TEST_CASE("softmax weights stay on the simplex at every node") {
  const auto m = constant_drift_model(0.2, 0.5, 1.0);
  const auto v = solve_regularized(m, GridSpec::make(16, 4, 1.0), 0.3);
  for (const auto& slice : v.weights)
    for (std::size_t node = 0; node + 1 < slice.size(); node += 2) {
      CHECK(slice[node] >= 0.0);
      CHECK(slice[node + 1] >= 0.0);
      CHECK(slice[node] + slice[node + 1] == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("a poisoned model is diagnosed at the first bad node") {
  auto m = constant_drift_model(0.1, 0.2, 1.0);
  m.sigma_hat[0] = std::numeric_limits<double>::quiet_NaN();
  m.sigma_hat[1] = std::numeric_limits<double>::quiet_NaN();
  HjbSweeper sweep(m, GridSpec::make(16, 4, 1.0), Scheme::diffusive);
  CHECK_THROWS_WITH_AS(sweep.step(), doctest::Contains("slice"), NumericError);
}

TEST_CASE("solver capacity cap") {
  SolverOptions opts;
  opts.memory_cap_bytes = 1 << 16;
  const auto m = constant_drift_model(0.1, 0.2, 1.0);
  CHECK_THROWS_AS((void)solve_diffusive(m, GridSpec::make(64, 8, 1.0), opts), CapacityError);
}
