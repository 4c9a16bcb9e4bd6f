#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace bhjb {

/// Which values a Bernoulli arm pays out. The tag selects both the posterior
/// map and the limit map.
enum class BernoulliSupport { zero_one, pm_gamma };

/// Per-arm cumulative rewards and pull counts at the start of a round; the
/// sufficient statistic for every conjugate posterior in the library.
struct HistoryState {
  std::vector<double> s;        // cumulative reward per arm, reward units
  std::vector<std::int64_t> q;  // pulls per arm
  std::int64_t round = 1;       // 1-based; sum(q) == round-1 in simulated episodes

  explicit HistoryState(int num_arms = 0)
      : s(static_cast<std::size_t>(num_arms), 0.0),
        q(static_cast<std::size_t>(num_arms), 0) {}

  int num_arms() const { return static_cast<int>(s.size()); }
};

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
};

struct NormalParams {
  double mean = 0.0;
  double variance = 1.0;
};

/// Gaussian over the linear-bandit parameter vector.
struct GaussianVecParams {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // symmetric positive definite
};

}  // namespace bhjb
