#include "bandit_hjb/hjb_solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "bandit_hjb/errors.hpp"

namespace bhjb {
namespace {

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

/// Visit every (i[], j[]) grid node; probe-only (not the hot path).
void for_each_node(const GridSpec& g, int pairs,
                   const std::function<void(const std::int64_t*, const std::int64_t*)>& fn) {
  std::vector<std::int64_t> i(static_cast<std::size_t>(pairs), -g.N_s);
  std::vector<std::int64_t> j(static_cast<std::size_t>(pairs), 0);
  const std::int64_t qN = ipow(g.N_q + 1, pairs);
  const std::int64_t sN = ipow(2 * g.N_s + 1, pairs);
  for (std::int64_t jq = 0; jq < qN; ++jq) {
    for (int p = 0; p < pairs; ++p) i[static_cast<std::size_t>(p)] = -g.N_s;
    for (std::int64_t is = 0; is < sN; ++is) {
      fn(i.data(), j.data());
      for (int p = pairs - 1; p >= 0; --p) {
        if (++i[static_cast<std::size_t>(p)] <= g.N_s) break;
        i[static_cast<std::size_t>(p)] = -g.N_s;
      }
    }
    for (int p = pairs - 1; p >= 0; --p) {
      if (++j[static_cast<std::size_t>(p)] <= g.N_q) break;
      j[static_cast<std::size_t>(p)] = 0;
    }
  }
}

bool inside_envelope(const LimitModel& model, const GridSpec& g, const std::int64_t* i,
                     const std::int64_t* j) {
  if (!model.envelope) return true;
  const double lo = model.envelope->lo_slope;
  const double hi = model.envelope->hi_slope;
  for (int p = 0; p < model.pairs; ++p) {
    const double s = static_cast<double>(i[p]) * g.ds();
    const double q = static_cast<double>(j[p]) * g.dq();
    const double slack = 1e-12 * std::max(1.0, std::abs(s));
    if (s < lo * q - slack || s > hi * q + slack) return false;
  }
  return true;
}

}  // namespace

HjbSweeper::HjbSweeper(const LimitModel& model, const GridSpec& grid, Scheme scheme,
                       double lambda, std::uint64_t memory_cap_bytes)
    : model_(model), grid_(grid), scheme_(scheme), lambda_(lambda), slice_(grid.N_t) {
  if (grid_.N_t < 1 || grid_.N_s < 1 || grid_.N_q < 1 || grid_.S <= 0.0)
    throw ConfigError("grid spec: N_t, N_s, N_q must be positive and S > 0");
  if (scheme_ == Scheme::diffusive && model_.deterministic)
    throw ConfigError("diffusive scheme on a deterministic model; use the upwind scheme");
  if (scheme_ == Scheme::deterministic && !model_.deterministic)
    throw ConfigError("upwind scheme on a diffusive model; use the diffusive scheme");
  if (lambda_ < 0.0) throw ConfigError("regularization lambda must be >= 0");

  s_nodes_ = ipow(2 * grid_.N_s + 1, model_.pairs);
  nodes_ = s_nodes_ * ipow(grid_.N_q + 1, model_.pairs);
  const double slice_bytes = static_cast<double>(nodes_) *
                             (16.0 + 1.0 + (lambda_ > 0.0 ? 8.0 * model_.arms : 0.0));
  if (slice_bytes > static_cast<double>(memory_cap_bytes))
    throw CapacityError("grid sweep needs ~" + std::to_string(static_cast<std::uint64_t>(slice_bytes)) +
                            " bytes per slice pair, over the cap",
                        static_cast<std::uint64_t>(slice_bytes));

  check_stability();

  s_coord_.resize(static_cast<std::size_t>(2 * grid_.N_s + 1));
  for (int i = -grid_.N_s; i <= grid_.N_s; ++i)
    s_coord_[static_cast<std::size_t>(i + grid_.N_s)] = static_cast<double>(i) * grid_.ds();
  q_coord_.resize(static_cast<std::size_t>(grid_.N_q + 1));
  for (int j = 0; j <= grid_.N_q; ++j)
    q_coord_[static_cast<std::size_t>(j)] = static_cast<double>(j) * grid_.dq();

  cur_values_.assign(static_cast<std::size_t>(nodes_), 0.0);
  next_values_.assign(static_cast<std::size_t>(nodes_), 0.0);
  cur_greedy_.assign(static_cast<std::size_t>(nodes_), 0);
  if (lambda_ > 0.0)
    cur_weights_.assign(static_cast<std::size_t>(nodes_) * static_cast<std::size_t>(model_.arms), 0.0);
  fill_terminal();
}

void HjbSweeper::check_stability() const {
  const double dt = grid_.dt();
  const double ds = grid_.ds();
  if (scheme_ == Scheme::diffusive) {
    double max_sigma_sq = 0.0;
    for (int k = 0; k < model_.arms; ++k)
      max_sigma_sq = std::max(max_sigma_sq, model_.sigma_hat[static_cast<std::size_t>(k)] *
                                                model_.sigma_hat[static_cast<std::size_t>(k)]);
    const double bound = ds * ds / max_sigma_sq;
    if (dt > bound * (1.0 + 1e-12)) {
      char msg[256];
      std::snprintf(msg, sizeof msg,
                    "diffusive scheme unstable: dt = %.6g > ds^2 / max sigma^2 = %.6g; "
                    "use N_t >= %lld",
                    dt, bound, static_cast<long long>(std::ceil(1.0 / bound)));
      throw StabilityError(msg, bound);
    }
    return;
  }
  // Transport-only CFL: sup |mu| dt <= ds, sup over (envelope-restricted) nodes.
  double sup_mu = 0.0;
  std::vector<double> sv(static_cast<std::size_t>(model_.pairs));
  std::vector<double> qv(static_cast<std::size_t>(model_.pairs));
  for_each_node(grid_, model_.pairs, [&](const std::int64_t* i, const std::int64_t* j) {
    if (!inside_envelope(model_, grid_, i, j)) return;
    for (int p = 0; p < model_.pairs; ++p) {
      sv[static_cast<std::size_t>(p)] = static_cast<double>(i[p]) * grid_.ds();
      qv[static_cast<std::size_t>(p)] = static_cast<double>(j[p]) * grid_.dq();
    }
    for (int k = 0; k < model_.arms; ++k) {
      if (model_.arm_pair[static_cast<std::size_t>(k)] < 0) continue;
      sup_mu = std::max(sup_mu, std::abs(model_.drift(k, sv.data(), qv.data())));
    }
  });
  if (sup_mu * dt > ds * (1.0 + 1e-12)) {
    char msg[256];
    std::snprintf(msg, sizeof msg,
                  "upwind scheme unstable: sup|mu| dt = %.6g > ds = %.6g (sup|mu| = %.6g); "
                  "largest stable dt = %.6g",
                  sup_mu * dt, ds, sup_mu, ds / sup_mu);
    throw StabilityError(msg, ds / sup_mu);
  }
}

void HjbSweeper::fill_terminal() {
  // Terminal boundary: zero values; the stored policy is the myopic greedy
  // (softmax of drifts when regularized). Episodes never consult it (round n
  // maps to t < 1), only direct t = 1 lookups do.
  std::vector<double> sv(static_cast<std::size_t>(model_.pairs));
  std::vector<double> qv(static_cast<std::size_t>(model_.pairs));
  std::vector<double> mu(static_cast<std::size_t>(model_.arms));
  std::int64_t node = 0;
  for_each_node(grid_, model_.pairs, [&](const std::int64_t* i, const std::int64_t* j) {
    for (int p = 0; p < model_.pairs; ++p) {
      sv[static_cast<std::size_t>(p)] = static_cast<double>(i[p]) * grid_.ds();
      qv[static_cast<std::size_t>(p)] = static_cast<double>(j[p]) * grid_.dq();
    }
    int best = 0;
    for (int k = 0; k < model_.arms; ++k) {
      mu[static_cast<std::size_t>(k)] = model_.drift(k, sv.data(), qv.data());
      if (mu[static_cast<std::size_t>(k)] > mu[static_cast<std::size_t>(best)]) best = k;
    }
    cur_greedy_[static_cast<std::size_t>(node)] = static_cast<std::uint8_t>(best);
    if (lambda_ > 0.0) {
      double z = 0.0;
      const double m = mu[static_cast<std::size_t>(best)];
      for (int k = 0; k < model_.arms; ++k)
        z += std::exp((mu[static_cast<std::size_t>(k)] - m) / lambda_);
      for (int k = 0; k < model_.arms; ++k)
        cur_weights_[static_cast<std::size_t>(node) * model_.arms + static_cast<std::size_t>(k)] =
            std::exp((mu[static_cast<std::size_t>(k)] - m) / lambda_) / z;
    }
    ++node;
  });
}

std::int64_t HjbSweeper::node_index(const std::int64_t* i, const std::int64_t* j) const {
  const std::int64_t Ls = 2 * grid_.N_s + 1;
  const std::int64_t Lq = grid_.N_q + 1;
  std::int64_t q_flat = 0, s_flat = 0;
  for (int p = 0; p < model_.pairs; ++p) {
    q_flat = q_flat * Lq + j[p];
    s_flat = s_flat * Ls + (i[p] + grid_.N_s);
  }
  return q_flat * s_nodes_ + s_flat;
}

void HjbSweeper::step() {
  if (done()) throw std::logic_error("hjb sweep already at slice 0");
  const int M = model_.pairs;
  const int K = model_.arms;
  const std::int64_t Ls = 2 * grid_.N_s + 1;
  const std::int64_t Lq = grid_.N_q + 1;
  const double dt = grid_.dt();
  const double r_q = dt / grid_.dq();
  const double r_s = dt / grid_.ds();
  const double c_s = dt / (2.0 * grid_.ds());
  std::vector<double> diff_coef(static_cast<std::size_t>(K), 0.0);
  for (int k = 0; k < K; ++k) {
    const double sh = model_.sigma_hat[static_cast<std::size_t>(k)];
    diff_coef[static_cast<std::size_t>(k)] = sh * sh * dt / (2.0 * grid_.ds() * grid_.ds());
  }
  // Node strides for +1 steps in each pair's q and s index.
  std::vector<std::int64_t> s_stride(static_cast<std::size_t>(M));
  std::vector<std::int64_t> q_stride(static_cast<std::size_t>(M));
  for (int p = 0; p < M; ++p) {
    s_stride[static_cast<std::size_t>(p)] = ipow(Ls, M - 1 - p);
    q_stride[static_cast<std::size_t>(p)] = ipow(Lq, M - 1 - p) * s_nodes_;
  }

  const std::vector<double>& prev = cur_values_;
  std::vector<double>& out = next_values_;

  std::vector<std::int64_t> i(static_cast<std::size_t>(M));
  std::vector<std::int64_t> j(static_cast<std::size_t>(M), 0);
  std::vector<double> sv(static_cast<std::size_t>(M));
  std::vector<double> qv(static_cast<std::size_t>(M), 0.0);
  std::vector<double> g(static_cast<std::size_t>(K));
  const std::int64_t qN = ipow(Lq, M);
  const bool linear = model_.has_linear_drift();
  const bool regularized = lambda_ > 0.0;

  std::int64_t idx = 0;
  for (std::int64_t jq = 0; jq < qN; ++jq) {
    LinearDriftFactor lf;
    if (linear) lf = linear_drift_factor(model_, qv.data());
    for (int p = 0; p < M; ++p) {
      i[static_cast<std::size_t>(p)] = -grid_.N_s;
      sv[static_cast<std::size_t>(p)] = s_coord_[0];
    }
    for (std::int64_t is = 0; is < s_nodes_; ++is, ++idx) {
      const double vc = prev[static_cast<std::size_t>(idx)];
      for (int k = 0; k < K; ++k) {
        const int p = model_.arm_pair[static_cast<std::size_t>(k)];
        const auto& spec = model_.drift_spec[static_cast<std::size_t>(k)];
        if (p < 0) {
          g[static_cast<std::size_t>(k)] = vc + dt * spec.alpha_hat;
          continue;
        }
        double mu;
        if (spec.kind == LimitModel::DriftKind::ratio) {
          const double den = std::max(spec.beta_hat + qv[static_cast<std::size_t>(p)],
                                      LimitModel::kDenominatorFloor);
          mu = (spec.alpha_hat + sv[static_cast<std::size_t>(p)]) / den;
        } else if (spec.kind == LimitModel::DriftKind::constant) {
          mu = spec.alpha_hat;
        } else {
          mu = linear_drift_eval(model_, lf, k, sv.data());
        }
        const std::int64_t node_jp =
            idx + (j[static_cast<std::size_t>(p)] < grid_.N_q ? q_stride[static_cast<std::size_t>(p)] : 0);
        const double vjp = prev[static_cast<std::size_t>(node_jp)];
        const double vpp = prev[static_cast<std::size_t>(
            node_jp + (i[static_cast<std::size_t>(p)] < grid_.N_s ? s_stride[static_cast<std::size_t>(p)] : 0))];
        const double vmp = prev[static_cast<std::size_t>(
            node_jp - (i[static_cast<std::size_t>(p)] > -grid_.N_s ? s_stride[static_cast<std::size_t>(p)] : 0))];
        double gk;
        if (scheme_ == Scheme::diffusive) {
          gk = vc + mu * c_s * (vpp - vmp) + r_q * (vjp - vc) +
               diff_coef[static_cast<std::size_t>(k)] * (vpp - 2.0 * vjp + vmp) + dt * mu;
        } else {
          const double mu_pos = std::max(mu, 0.0);
          const double mu_neg = std::min(mu, 0.0);
          gk = vc + r_s * (mu_pos * (vpp - vjp) + mu_neg * (vjp - vmp)) + r_q * (vjp - vc) +
               dt * mu;
        }
        g[static_cast<std::size_t>(k)] = gk;
      }

      int best = 0;
      for (int k = 1; k < K; ++k)
        if (g[static_cast<std::size_t>(k)] > g[static_cast<std::size_t>(best)]) best = k;
      cur_greedy_[static_cast<std::size_t>(idx)] = static_cast<std::uint8_t>(best);
      if (!regularized) {
        out[static_cast<std::size_t>(idx)] = g[static_cast<std::size_t>(best)];
      } else {
        // v^l = v^{l+1} + dt lambda log sum exp((g_k - v^{l+1})/(dt lambda)),
        // max-subtracted; weights are the softmax terms.
        const double h_max = (g[static_cast<std::size_t>(best)] - vc) / dt;
        double z = 0.0;
        for (int k = 0; k < K; ++k) {
          const double e =
              std::exp(((g[static_cast<std::size_t>(k)] - vc) / dt - h_max) / lambda_);
          cur_weights_[static_cast<std::size_t>(idx) * K + static_cast<std::size_t>(k)] = e;
          z += e;
        }
        for (int k = 0; k < K; ++k)
          cur_weights_[static_cast<std::size_t>(idx) * K + static_cast<std::size_t>(k)] /= z;
        out[static_cast<std::size_t>(idx)] = vc + dt * (lambda_ * std::log(z) + h_max);
      }

      for (int p = M - 1; p >= 0; --p) {
        if (++i[static_cast<std::size_t>(p)] <= grid_.N_s) {
          sv[static_cast<std::size_t>(p)] =
              s_coord_[static_cast<std::size_t>(i[static_cast<std::size_t>(p)] + grid_.N_s)];
          break;
        }
        i[static_cast<std::size_t>(p)] = -grid_.N_s;
        sv[static_cast<std::size_t>(p)] = s_coord_[0];
      }
    }
    for (int p = M - 1; p >= 0; --p) {
      auto& jp = j[static_cast<std::size_t>(p)];
      if (++jp <= grid_.N_q) {
        qv[static_cast<std::size_t>(p)] = q_coord_[static_cast<std::size_t>(jp)];
        break;
      }
      jp = 0;
      qv[static_cast<std::size_t>(p)] = 0.0;
    }
  }

  --slice_;
  cur_values_.swap(next_values_);

  // NaN scan with the first offending node named.
  for (std::int64_t nidx = 0; nidx < nodes_; ++nidx) {
    if (std::isnan(cur_values_[static_cast<std::size_t>(nidx)])) {
      std::int64_t s_flat = nidx % s_nodes_;
      std::int64_t q_flat = nidx / s_nodes_;
      std::string where = "slice " + std::to_string(slice_) + " node i=(";
      std::vector<std::int64_t> ii(static_cast<std::size_t>(M)), jj(static_cast<std::size_t>(M));
      for (int p = M - 1; p >= 0; --p) {
        ii[static_cast<std::size_t>(p)] = s_flat % Ls - grid_.N_s;
        s_flat /= Ls;
        jj[static_cast<std::size_t>(p)] = q_flat % Lq;
        q_flat /= Lq;
      }
      for (int p = 0; p < M; ++p)
        where += std::to_string(ii[static_cast<std::size_t>(p)]) + (p + 1 < M ? "," : "");
      where += ") j=(";
      for (int p = 0; p < M; ++p)
        where += std::to_string(jj[static_cast<std::size_t>(p)]) + (p + 1 < M ? "," : "");
      where += ")";
      throw NumericError("NaN detected during sweep at " + where);
    }
  }
}

namespace {

GridValueFunction run_solve(const LimitModel& model, const GridSpec& grid, Scheme scheme,
                            double lambda, const SolverOptions& opts) {
  const double per_slice = static_cast<double>(ipow(2 * grid.N_s + 1, model.pairs)) *
                           static_cast<double>(ipow(grid.N_q + 1, model.pairs));
  double persist_bytes = 0.0;
  if (opts.persist_values) persist_bytes += per_slice * 8.0 * (grid.N_t + 1);
  if (opts.persist_policy)
    persist_bytes += per_slice * (1.0 + (lambda > 0.0 ? 8.0 * model.arms : 0.0)) * (grid.N_t + 1);
  if (persist_bytes > static_cast<double>(opts.memory_cap_bytes))
    throw CapacityError("persisted grid solve needs ~" +
                            std::to_string(static_cast<std::uint64_t>(persist_bytes)) +
                            " bytes, over the cap; shrink the grid or disable persistence",
                        static_cast<std::uint64_t>(persist_bytes));

  HjbSweeper sweep(model, grid, scheme, lambda, opts.memory_cap_bytes);
  GridValueFunction v;
  v.grid = grid;
  v.scheme = scheme;
  v.lambda = lambda;
  v.arms = model.arms;
  v.pairs = model.pairs;
  v.arm_pair = model.arm_pair;
  v.nodes_per_slice = sweep.nodes_per_slice();
  if (opts.persist_values) v.values.resize(static_cast<std::size_t>(grid.N_t + 1));
  if (opts.persist_policy) {
    v.greedy.resize(static_cast<std::size_t>(grid.N_t + 1));
    if (lambda > 0.0) v.weights.resize(static_cast<std::size_t>(grid.N_t + 1));
  }
  const auto store = [&](int l) {
    if (opts.persist_values) v.values[static_cast<std::size_t>(l)] = sweep.values();
    if (opts.persist_policy) {
      v.greedy[static_cast<std::size_t>(l)] = sweep.greedy();
      if (lambda > 0.0) v.weights[static_cast<std::size_t>(l)] = sweep.weights();
    }
  };
  store(grid.N_t);
  while (!sweep.done()) {
    sweep.step();
    store(sweep.slice());
  }
  return v;
}

}  // namespace

GridValueFunction solve_diffusive(const LimitModel& model, const GridSpec& grid,
                                  const SolverOptions& opts) {
  return run_solve(model, grid, Scheme::diffusive, 0.0, opts);
}

GridValueFunction solve_deterministic(const LimitModel& model, const GridSpec& grid,
                                      const SolverOptions& opts) {
  return run_solve(model, grid, Scheme::deterministic, 0.0, opts);
}

GridValueFunction solve_regularized(const LimitModel& model, const GridSpec& grid, double lambda,
                                    const SolverOptions& opts) {
  if (lambda <= 0.0) throw ConfigError("regularized solve: lambda must be positive");
  return run_solve(model, grid, model.deterministic ? Scheme::deterministic : Scheme::diffusive,
                   lambda, opts);
}

GridValueFunction solve_hjb(const LimitModel& model, const GridSpec& grid, double lambda,
                            const SolverOptions& opts) {
  if (lambda > 0.0) return solve_regularized(model, grid, lambda, opts);
  return model.deterministic ? solve_deterministic(model, grid, opts)
                             : solve_diffusive(model, grid, opts);
}

double verify_stencil(const GridValueFunction& v, const LimitModel& model, int samples,
                      CounterRng& rng) {
  if (!v.has_values()) throw ConfigError("stencil check needs persisted values");
  const int M = v.pairs;
  const int K = v.arms;
  const double dt = v.grid.dt();
  double worst = 0.0;
  std::vector<std::int64_t> i(static_cast<std::size_t>(M));
  std::vector<std::int64_t> j(static_cast<std::size_t>(M));
  std::vector<double> sv(static_cast<std::size_t>(M));
  std::vector<double> qv(static_cast<std::size_t>(M));
  std::vector<double> g(static_cast<std::size_t>(K));
  for (int it = 0; it < samples; ++it) {
    const int l = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(v.grid.N_t));
    for (int p = 0; p < M; ++p) {
      // interior nodes only: all clamped reads excluded
      i[static_cast<std::size_t>(p)] =
          static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(2 * v.grid.N_s - 1)) -
          (v.grid.N_s - 1);
      j[static_cast<std::size_t>(p)] =
          static_cast<std::int64_t>(rng.next_u64() % static_cast<std::uint64_t>(v.grid.N_q));
      sv[static_cast<std::size_t>(p)] = static_cast<double>(i[static_cast<std::size_t>(p)]) * v.grid.ds();
      qv[static_cast<std::size_t>(p)] = static_cast<double>(j[static_cast<std::size_t>(p)]) * v.grid.dq();
    }
    const std::int64_t idx = v.node_index(i.data(), j.data());
    const std::vector<double>& prev = v.values[static_cast<std::size_t>(l + 1)];
    const double vc = prev[static_cast<std::size_t>(idx)];
    LinearDriftFactor lf;
    if (model.has_linear_drift()) lf = linear_drift_factor(model, qv.data());
    for (int k = 0; k < K; ++k) {
      const int p = v.arm_pair[static_cast<std::size_t>(k)];
      const auto& spec = model.drift_spec[static_cast<std::size_t>(k)];
      if (p < 0) {
        g[static_cast<std::size_t>(k)] = vc + dt * spec.alpha_hat;
        continue;
      }
      double mu;
      if (spec.kind == LimitModel::DriftKind::ratio) {
        const double den = std::max(spec.beta_hat + qv[static_cast<std::size_t>(p)],
                                    LimitModel::kDenominatorFloor);
        mu = (spec.alpha_hat + sv[static_cast<std::size_t>(p)]) / den;
      } else if (spec.kind == LimitModel::DriftKind::constant) {
        mu = spec.alpha_hat;
      } else {
        mu = linear_drift_eval(model, lf, k, sv.data());
      }
      std::vector<std::int64_t> i2 = i, j2 = j;
      j2[static_cast<std::size_t>(p)] += 1;
      const double vjp = prev[static_cast<std::size_t>(v.node_index(i2.data(), j2.data()))];
      i2[static_cast<std::size_t>(p)] += 1;
      const double vpp = prev[static_cast<std::size_t>(v.node_index(i2.data(), j2.data()))];
      i2[static_cast<std::size_t>(p)] -= 2;
      const double vmp = prev[static_cast<std::size_t>(v.node_index(i2.data(), j2.data()))];
      const double sh = model.sigma_hat[static_cast<std::size_t>(k)];
      if (v.scheme == Scheme::diffusive) {
        g[static_cast<std::size_t>(k)] =
            vc + dt * (mu * (vpp - vmp) / (2.0 * v.grid.ds()) + (vjp - vc) / v.grid.dq() +
                       sh * sh * (vpp - 2.0 * vjp + vmp) / (2.0 * v.grid.ds() * v.grid.ds()) + mu);
      } else {
        const double mu_pos = std::max(mu, 0.0);
        const double mu_neg = std::min(mu, 0.0);
        g[static_cast<std::size_t>(k)] =
            vc + dt * (mu_pos * (vpp - vjp) / v.grid.ds() + mu_neg * (vjp - vmp) / v.grid.ds() +
                       (vjp - vc) / v.grid.dq() + mu);
      }
    }
    double expect;
    if (v.lambda > 0.0) {
      double h_max = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) h_max = std::max(h_max, (g[static_cast<std::size_t>(k)] - vc) / dt);
      double z = 0.0;
      for (int k = 0; k < K; ++k)
        z += std::exp(((g[static_cast<std::size_t>(k)] - vc) / dt - h_max) / v.lambda);
      expect = vc + dt * (v.lambda * std::log(z) + h_max);
    } else {
      expect = g[0];
      for (int k = 1; k < K; ++k) expect = std::max(expect, g[static_cast<std::size_t>(k)]);
    }
    const double stored = v.values[static_cast<std::size_t>(l)][static_cast<std::size_t>(idx)];
    worst = std::max(worst, std::abs(expect - stored) / std::max(1.0, std::abs(stored)));
  }
  return worst;
}

}  // namespace bhjb
