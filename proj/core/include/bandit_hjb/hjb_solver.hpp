#pragma once

#include <cstdint>
#include <vector>

#include "bandit_hjb/grid.hpp"
#include "bandit_hjb/limit_model.hpp"
#include "bandit_hjb/rng.hpp"

namespace bhjb {

struct SolverOptions {
  bool persist_values = true;
  bool persist_policy = true;
  std::uint64_t memory_cap_bytes = 2ull * 1024 * 1024 * 1024;
};

/// Explicit backward sweep of the limiting equation on a GridSpec lattice,
/// one slice at a time. Exposed so error studies can stream against huge
/// grids without persisting every slice.
///
/// Diffusive scheme (sigma_hat > 0): centered first difference in s, forward
/// difference in q, centered second difference at the advanced q slice;
/// stable when dt <= ds^2 / max sigma_hat^2. Transport-only scheme
/// (sigma_hat = 0): upwind one-sided differences split by drift sign; stable
/// when sup|mu_hat| dt <= ds, with the sup probed over grid nodes inside the
/// model's reachable envelope when it has one.
class HjbSweeper {
public:
  HjbSweeper(const LimitModel& model, const GridSpec& grid, Scheme scheme, double lambda = 0.0,
             std::uint64_t memory_cap_bytes = 2ull * 1024 * 1024 * 1024);

  int slice() const { return slice_; }  // slice whose values are current; starts at N_t
  bool done() const { return slice_ == 0; }
  void step();  // compute slice-1 from slice

  const std::vector<double>& values() const { return cur_values_; }
  const std::vector<std::uint8_t>& greedy() const { return cur_greedy_; }
  const std::vector<double>& weights() const { return cur_weights_; }  // regularized only

  const GridSpec& grid() const { return grid_; }
  const LimitModel& model() const { return model_; }
  Scheme scheme() const { return scheme_; }
  double lambda() const { return lambda_; }
  std::int64_t nodes_per_slice() const { return nodes_; }
  std::int64_t node_index(const std::int64_t* i, const std::int64_t* j) const;

private:
  void check_stability() const;
  void fill_terminal();

  LimitModel model_;
  GridSpec grid_;
  Scheme scheme_;
  double lambda_;
  int slice_;
  std::int64_t nodes_ = 0;
  std::int64_t s_nodes_ = 0;  // Ls^pairs
  std::vector<double> cur_values_, next_values_;
  std::vector<std::uint8_t> cur_greedy_;
  std::vector<double> cur_weights_;
  std::vector<double> s_coord_, q_coord_;  // per grid index, shared across pairs
};

/// Full solves; refuse unstable meshes (StabilityError), reject grids over the
/// memory cap (CapacityError), and diagnose the first NaN node (NumericError).
GridValueFunction solve_diffusive(const LimitModel& model, const GridSpec& grid,
                                  const SolverOptions& opts = {});
GridValueFunction solve_deterministic(const LimitModel& model, const GridSpec& grid,
                                      const SolverOptions& opts = {});

/// Entropy-regularized variant: the slice update becomes
/// v^l = v^{l+1} + dt * lambda * log sum_k exp((g_k - v^{l+1}) / (dt lambda)),
/// with per-node softmax weights stored; the underlying scheme follows the
/// model (upwind when deterministic, diffusive otherwise).
GridValueFunction solve_regularized(const LimitModel& model, const GridSpec& grid, double lambda,
                                    const SolverOptions& opts = {});

/// Auto-dispatch on model.deterministic; lambda 0 means unregularized.
GridValueFunction solve_hjb(const LimitModel& model, const GridSpec& grid, double lambda = 0.0,
                            const SolverOptions& opts = {});

/// Re-evaluate the defining update at sampled interior nodes of a persisted
/// solve; returns the max |recomputed - stored| / max(1, |stored|).
double verify_stencil(const GridValueFunction& v, const LimitModel& model, int samples,
                      CounterRng& rng);

}  // namespace bhjb
