#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bandit_hjb/env.hpp>
#include <bandit_hjb/errors.hpp>
#include <bandit_hjb/key_value.hpp>
#include <bandit_hjb/posterior.hpp>
#include <bandit_hjb/rng.hpp>
#include <cmath>

#include "support/oracles.hpp"

using namespace bhjb;

TEST_CASE("key=value parser") {
  const auto kv = KeyValueMap::parse_string(
      "# comment\n"
      "family = normal\n"
      "K=5\n"
      "sigma=1.0   # trailing comment\n"
      "nu=0.1, 0.2 ,0.3\n");
  CHECK(kv.get_string("family") == "normal");
  CHECK(kv.get_int("K") == 5);
  CHECK(kv.get_double("sigma") == 1.0);
  CHECK(kv.get_double_list("nu") == std::vector<double>{0.1, 0.2, 0.3});
  CHECK(kv.get_double_or("gamma", 2.0) == 2.0);
  CHECK_THROWS_AS((void)kv.get_string("missing"), ConfigError);
  CHECK_THROWS_AS((void)KeyValueMap::parse_string("no equals here\n"), ConfigError);
  CHECK_THROWS_AS((void)kv.get_double("family"), ConfigError);
}

TEST_CASE("counter rng is keyed and reproducible") {
  CounterRng a(CounterRng::derive_key({1, 2, 3}));
  CounterRng b(CounterRng::derive_key({1, 2, 3}));
  CounterRng c(CounterRng::derive_key({1, 2, 4}));
  bool any_diff = false;
  for (int i = 0; i < 16; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    any_diff |= (x != c.next_u64());
  }
  CHECK(any_diff);

  // rough moment sanity for the hand-rolled samplers
  CounterRng r(42);
  double sum = 0.0, sum2 = 0.0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double z = r.next_normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / N) < 0.02);
  CHECK(std::abs(sum2 / N - 1.0) < 0.02);

  double bsum = 0.0;
  for (int i = 0; i < N / 4; ++i) bsum += r.next_beta(3.0, 1.0);
  CHECK(std::abs(bsum / (N / 4) - 0.75) < 0.01);
}

TEST_CASE("bernoulli posterior updates") {
  SUBCASE("no observations leave the prior unchanged") {
    const auto p = posterior_bernoulli({1, 1}, 1.0, 0.0, 0, BernoulliSupport::pm_gamma);
    CHECK(p.alpha == 1.0);
    CHECK(p.beta == 1.0);
  }
  SUBCASE("+-1 rewards, two wins") {
    const auto p = posterior_bernoulli({1, 1}, 1.0, 2.0, 2, BernoulliSupport::pm_gamma);
    CHECK(p.alpha == doctest::Approx(3.0));
    CHECK(p.beta == doctest::Approx(1.0));
  }
  SUBCASE("+-0.5 rewards, net loss") {
    const auto p = posterior_bernoulli({2, 3}, 0.5, -1.0, 2, BernoulliSupport::pm_gamma);
    CHECK(p.alpha == doctest::Approx(2.0));
    CHECK(p.beta == doctest::Approx(5.0));
  }
  SUBCASE("{0,1} support counts successes") {
    const auto p = posterior_bernoulli({2, 3}, 1.0, 4.0, 6, BernoulliSupport::zero_one);
    CHECK(p.alpha == doctest::Approx(6.0));
    CHECK(p.beta == doctest::Approx(5.0));
  }
  SUBCASE("impossible history names the arm") {
    CHECK_THROWS_WITH_AS(
        (void)posterior_bernoulli({0.1, 0.1}, 1.0, -5.0, 1, BernoulliSupport::pm_gamma, 2),
        doctest::Contains("arm 3"), InvalidHistoryError);
  }
}

TEST_CASE("bernoulli posterior mean and second moment") {
  SUBCASE("symmetry gives zero mean") {
    const auto [m, v] = posterior_mean_var_bernoulli({7.5, 7.5}, 3.0);
    CHECK(m == doctest::Approx(0.0));
    CHECK(v == doctest::Approx(9.0));
  }
  SUBCASE("hand values") {
    const auto [m1, v1] = posterior_mean_var_bernoulli({3, 1}, 1.0);
    CHECK(m1 == doctest::Approx(0.5));
    CHECK(v1 == doctest::Approx(1.0));
    const auto [m2, v2] = posterior_mean_var_bernoulli({1, 3}, 2.0);
    CHECK(m2 == doctest::Approx(-1.0));
    CHECK(v2 == doctest::Approx(4.0));
  }
  SUBCASE("mean stays strictly inside (-gamma, gamma)") {
    CounterRng rng(7);
    for (int i = 0; i < 200; ++i) {
      const double a = 0.01 + 5.0 * rng.next_double();
      const double b = 0.01 + 5.0 * rng.next_double();
      const double g = 0.1 + 3.0 * rng.next_double();
      const auto [m, v] = posterior_mean_var_bernoulli({a, b}, g);
      CHECK(m > -g);
      CHECK(m < g);
      CHECK(v == g * g);
    }
  }
}

TEST_CASE("normal posterior updates") {
  SUBCASE("no data is a no-op") {
    const auto p = posterior_normal({1.5, 2.5}, 1.0, 0.0, 0);
    CHECK(p.mean == doctest::Approx(1.5));
    CHECK(p.variance == doctest::Approx(2.5));
  }
  SUBCASE("hand values") {
    const auto p1 = posterior_normal({0, 1}, 1.0, 3.0, 3);
    CHECK(p1.mean == doctest::Approx(0.75));
    CHECK(p1.variance == doctest::Approx(0.25));
    const auto p2 = posterior_normal({1, 1}, std::sqrt(2.0), 2.0, 2);
    CHECK(p2.mean == doctest::Approx(1.0));
    CHECK(p2.variance == doctest::Approx(0.5));
  }
  SUBCASE("precision adds exactly") {
    CounterRng rng(11);
    for (int i = 0; i < 200; ++i) {
      const double v0 = 0.05 + rng.next_double();
      const double sigma = 0.2 + rng.next_double();
      const auto q = static_cast<std::int64_t>(rng.next_u64() % 50);
      const double s = 10.0 * (rng.next_double() - 0.5) * static_cast<double>(q);
      const auto p = posterior_normal({0.3, v0}, sigma, s, q);
      const double lhs = 1.0 / p.variance;
      const double rhs = 1.0 / v0 + static_cast<double>(q) / (sigma * sigma);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      CHECK(p.variance <= v0 + 1e-15);
      if (q == 0) CHECK(p.variance == doctest::Approx(v0));
    }
  }
}

TEST_CASE("linear posterior updates") {
  const auto vec1 = [](double x) {
    Eigen::VectorXd v(1);
    v << x;
    return v;
  };
  SUBCASE("no data returns the prior") {
    GaussianVecParams prior{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2) * 3.0};
    std::vector<Eigen::VectorXd> acts;
    Eigen::VectorXd a(2);
    a << 1.0, -0.5;
    acts.push_back(a);
    const auto p = posterior_linear(prior, 1.0, acts, {0.0}, {0});
    CHECK(p.mean.isZero(1e-14));
    CHECK(p.covariance.isApprox(prior.covariance, 1e-12));
  }
  SUBCASE("action dimension mismatch is rejected") {
    GaussianVecParams prior{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
    CHECK_THROWS_AS((void)posterior_linear(prior, 1.0, {vec1(1.0)}, {0.0}, {0}), ConfigError);
  }
  SUBCASE("d=1 with unit action matches the scalar normal update bitwise") {
    CounterRng rng(13);
    for (int i = 0; i < 100; ++i) {
      const double v0 = 0.05 + rng.next_double();
      const double m0 = 2.0 * (rng.next_double() - 0.5);
      const double sigma = 0.2 + rng.next_double();
      const auto q = static_cast<std::int64_t>(rng.next_u64() % 30);
      const double s = 5.0 * (rng.next_double() - 0.5) * static_cast<double>(std::max<std::int64_t>(q, 1));
      GaussianVecParams prior{vec1(m0), Eigen::MatrixXd::Constant(1, 1, v0)};
      const auto lin = posterior_linear(prior, sigma, {vec1(1.0)}, {s}, {q});
      const auto nrm = posterior_normal({m0, v0}, sigma, s, q);
      CHECK(lin.mean(0) == nrm.mean);
      CHECK(lin.covariance(0, 0) == nrm.variance);
    }
  }
  SUBCASE("hand value with half action") {
    GaussianVecParams prior{vec1(0.0), Eigen::MatrixXd::Constant(1, 1, 1.0)};
    const auto p = posterior_linear(prior, 1.0, {vec1(0.5)}, {1.0}, {4});
    CHECK(p.mean(0) == doctest::Approx(0.25));
    CHECK(p.covariance(0, 0) == doctest::Approx(0.5));
  }
  SUBCASE("dimension cap and SPD failures") {
    GaussianVecParams big{Eigen::VectorXd::Zero(9), Eigen::MatrixXd::Identity(9, 9)};
    CHECK_THROWS_AS((void)posterior_linear(big, 1.0, {}, {}, {}), ConfigError);
    GaussianVecParams bad{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, -1.0)};
    CHECK_THROWS_AS((void)posterior_linear(bad, 1.0, {vec1(1.0)}, {0.0}, {0}), NumericError);
  }
}

TEST_CASE("closed-form posteriors match quadrature Bayes updates") {
  CounterRng rng(101);
  const int points = 10000;

  SUBCASE("bernoulli, both supports") {
    for (int trial = 0; trial < 100; ++trial) {
      const double a = 0.5 + 4.0 * rng.next_double();
      const double b = 0.5 + 4.0 * rng.next_double();
      const double gamma = 0.25 + 2.0 * rng.next_double();
      const auto support =
          (trial % 2 == 0) ? BernoulliSupport::pm_gamma : BernoulliSupport::zero_one;
      const auto q = static_cast<std::int64_t>(rng.next_u64() % 40);
      std::int64_t ups = 0;
      const double nu_true = rng.next_double();
      for (std::int64_t i = 0; i < q; ++i)
        if (rng.next_double() < nu_true) ++ups;
      const double s = support == BernoulliSupport::zero_one
                           ? static_cast<double>(ups)
                           : gamma * static_cast<double>(2 * ups - q);

      const auto post = posterior_bernoulli({a, b}, gamma, s, q, support);
      const double closed = support == BernoulliSupport::zero_one
                                ? posterior_mean_bernoulli01(post)
                                : posterior_mean_var_bernoulli(post, gamma).first;

      const double downs = static_cast<double>(q - ups);
      const auto mean_fn = [&](double nu) {
        return support == BernoulliSupport::zero_one ? nu : gamma * (2.0 * nu - 1.0);
      };
      const double quad = oracle::quadrature_posterior_mean(
          [&](double nu) { return oracle::beta_density(nu, a, b); },
          [&](double nu) {
            return std::pow(nu, static_cast<double>(ups)) * std::pow(1.0 - nu, downs);
          },
          mean_fn, 0.0, 1.0, points);
      CHECK(closed == doctest::Approx(quad).epsilon(1e-3));
    }
  }

  SUBCASE("normal and linear (d=1)") {
    for (int trial = 0; trial < 100; ++trial) {
      const double m0 = 2.0 * (rng.next_double() - 0.5);
      const double v0 = 0.1 + rng.next_double();
      const double sigma = 0.3 + rng.next_double();
      const double action = trial % 2 == 0 ? 1.0 : 0.5 + rng.next_double();
      const auto q = static_cast<std::int64_t>(1 + rng.next_u64() % 30);
      double s = 0.0;
      const double nu_true = m0 + std::sqrt(v0) * rng.next_normal();
      for (std::int64_t i = 0; i < q; ++i)
        s += action * nu_true + sigma * rng.next_normal();

      Eigen::VectorXd av(1);
      av << action;
      GaussianVecParams prior{Eigen::VectorXd::Constant(1, m0),
                              Eigen::MatrixXd::Constant(1, 1, v0)};
      const auto post = posterior_linear(prior, sigma, {av}, {s}, {q});

      const double lo = m0 - 14.0 * (std::sqrt(v0) + sigma);
      const double hi = m0 + 14.0 * (std::sqrt(v0) + sigma);
      const double quad = oracle::quadrature_posterior_mean(
          [&](double nu) { return std::exp(-(nu - m0) * (nu - m0) / (2.0 * v0)); },
          [&](double nu) {
            // sufficient statistics of q observations with total s
            return std::exp(-(static_cast<double>(q) * action * action * nu * nu -
                              2.0 * action * s * nu) /
                            (2.0 * sigma * sigma));
          },
          [](double nu) { return nu; }, lo, hi, points);
      CHECK(post.mean(0) == doctest::Approx(quad).epsilon(1e-3));
      if (action == 1.0) {
        const auto nrm = posterior_normal({m0, v0}, sigma, s, q);
        CHECK(nrm.mean == doctest::Approx(quad).epsilon(1e-3));
      }
    }
  }
}

TEST_CASE("beta mass conservation") {
  CounterRng rng(19);
  SUBCASE("exact on half-integer priors and integer-consistent histories") {
    for (int i = 0; i < 300; ++i) {
      const double a = 0.5 * static_cast<double>(1 + rng.next_u64() % 40);
      const double b = 0.5 * static_cast<double>(1 + rng.next_u64() % 40);
      const auto q = static_cast<std::int64_t>(rng.next_u64() % 64);
      const auto ups = static_cast<std::int64_t>(rng.next_u64() % (q + 1));
      const double s = static_cast<double>(2 * ups - q);  // gamma = 1
      const auto p = posterior_bernoulli({a, b}, 1.0, s, q, BernoulliSupport::pm_gamma);
      CHECK(p.alpha + p.beta == a + b + static_cast<double>(q));
      const auto p01 = posterior_bernoulli({a, b}, 1.0, static_cast<double>(ups), q,
                                           BernoulliSupport::zero_one);
      CHECK(p01.alpha + p01.beta == a + b + static_cast<double>(q));
    }
  }
  SUBCASE("within an ulp for arbitrary real priors") {
    for (int i = 0; i < 300; ++i) {
      const double a = 0.5 + 10.0 * rng.next_double();
      const double b = 0.5 + 10.0 * rng.next_double();
      const auto q = static_cast<std::int64_t>(rng.next_u64() % 64);
      const auto ups = static_cast<std::int64_t>(rng.next_u64() % (q + 1));
      const double s = static_cast<double>(2 * ups - q);
      const auto p = posterior_bernoulli({a, b}, 1.0, s, q, BernoulliSupport::pm_gamma);
      CHECK(p.alpha + p.beta ==
            doctest::Approx(a + b + static_cast<double>(q)).epsilon(1e-15));
    }
  }
}

TEST_CASE("reward sampling hits degenerate limits") {
  CounterRng rng(5);
  SUBCASE("certain bernoulli arm") {
    EnvSpec env = BernoulliEnvSpec{{1.0, 0.0}, 1.0, BernoulliSupport::zero_one};
    for (int i = 0; i < 50; ++i) CHECK(sample_reward(env, 0, rng) == 1.0);
    EnvSpec pm = BernoulliEnvSpec{{1.0}, 2.5, BernoulliSupport::pm_gamma};
    for (int i = 0; i < 50; ++i) CHECK(sample_reward(pm, 0, rng) == 2.5);
  }
  SUBCASE("vanishing normal noise") {
    EnvSpec env = NormalEnvSpec{{0.7, -0.2}, 1e-12};
    for (int i = 0; i < 50; ++i) CHECK(sample_reward(env, 0, rng) == doctest::Approx(0.7).epsilon(1e-6));
  }
  SUBCASE("linear rewards are inner products") {
    Eigen::VectorXd nu(1), a(1);
    nu << 2.0;
    a << 3.0;
    EnvSpec env = LinearEnvSpec{nu, {a}, 1e-12};
    for (int i = 0; i < 50; ++i) CHECK(sample_reward(env, 0, rng) == doctest::Approx(6.0).epsilon(1e-6));
  }
  SUBCASE("bernoulli support values") {
    EnvSpec env = BernoulliEnvSpec{{0.5}, 1.5, BernoulliSupport::pm_gamma};
    for (int i = 0; i < 50; ++i) {
      const double x = sample_reward(env, 0, rng);
      CHECK((x == 1.5 || x == -1.5));
    }
  }
}

TEST_CASE("history steps") {
  HistoryState h(2);
  h = apply_step(h, 0, 1.0);
  CHECK(h.s == std::vector<double>{1.0, 0.0});
  CHECK(h.q == std::vector<std::int64_t>{1, 0});
  CHECK(h.round == 2);
  h = apply_step(h, 1, 0.0);
  CHECK(h.s == std::vector<double>{1.0, 0.0});
  CHECK(h.q == std::vector<std::int64_t>{1, 1});
  CHECK(h.round == 3);
  HistoryState g(2);
  g.s = {2.0, 3.0};
  g.q = {1, 2};
  g = apply_step(g, 1, -1.0);
  CHECK(g.s == std::vector<double>{2.0, 2.0});
  CHECK(g.q == std::vector<std::int64_t>{1, 3});
}

TEST_CASE("environment specs parse from key=value blocks") {
  const auto env = env_from_keyvalues(KeyValueMap::parse_string(
      "family=bernoulli\nnu=0.2,0.8\ngamma=1.5\nsupport=pm-gamma\n"));
  const auto& b = std::get<BernoulliEnvSpec>(env);
  CHECK(b.nu.size() == 2);
  CHECK(b.gamma == 1.5);

  const auto lin = env_from_keyvalues(KeyValueMap::parse_string(
      "family=linear\nK=2\nnu=0.25\nsigma=1.0\naction.1=0.1\naction.2=-0.1\n"));
  CHECK(true_means(lin) == std::vector<double>{0.025, -0.025});

  CHECK_THROWS_AS((void)env_from_keyvalues(KeyValueMap::parse_string("family=weird\n")),
                  ConfigError);
  CHECK_THROWS_AS(
      (void)env_from_keyvalues(KeyValueMap::parse_string("family=bernoulli\nnu=1.5\n")),
      ConfigError);
  CHECK_THROWS_AS(
      (void)env_from_keyvalues(KeyValueMap::parse_string("family=normal\nnu=0\nsigma=-1\n")),
      ConfigError);
}
