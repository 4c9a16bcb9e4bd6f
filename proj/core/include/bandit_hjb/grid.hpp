#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bandit_hjb/limit_model.hpp"

namespace bhjb {

enum class Scheme { diffusive, deterministic };

/// Floor with a 1e-9 relative snap so exact node coordinates computed through
/// division/multiplication still land on their own node.
inline std::int64_t floor_index(double x) {
  return static_cast<std::int64_t>(std::floor(x + 1e-9 * std::max(1.0, std::abs(x))));
}

/// Lattice over (t, s_hat, q_hat): t^l = l/N_t on [0,1], s^i = i*S/N_s on
/// [-S,S] per pair, q^j = j/N_q on [0,1] per pair. N_q defaults to N_t.
struct GridSpec {
  int N_t = 100;
  int N_s = 100;
  int N_q = 100;
  double S = 1.0;

  double dt() const { return 1.0 / N_t; }
  double ds() const { return S / N_s; }
  double dq() const { return 1.0 / N_q; }

  static GridSpec make(int N_t, int N_s, double S, int N_q = -1) {
    GridSpec g;
    g.N_t = N_t;
    g.N_s = N_s;
    g.N_q = N_q < 0 ? N_t : N_q;
    g.S = S;
    return g;
  }
};

/// Solved value function and policy on the lattice. Slice l = N_t is the
/// terminal boundary (values 0, myopic greedy policy).
struct GridValueFunction {
  GridSpec grid;
  Scheme scheme = Scheme::deterministic;
  double lambda = 0.0;
  int arms = 0;
  int pairs = 0;
  std::vector<int> arm_pair;

  // Node layout per slice: index = q_flat * Ls^pairs + s_flat with
  // s_flat/q_flat row-major over pairs, Ls = 2 N_s + 1, Lq = N_q + 1.
  std::int64_t nodes_per_slice = 0;

  std::vector<std::vector<double>> values;          // slices 0..N_t when persisted
  std::vector<std::vector<std::uint8_t>> greedy;    // slices 0..N_t when persisted
  std::vector<std::vector<double>> weights;         // arms per node, regularized only

  std::int64_t node_index(const std::int64_t* i, const std::int64_t* j) const;
  bool has_values() const { return !values.empty(); }
  bool has_policy() const { return !greedy.empty(); }
};

struct GridLookup {
  double value = 0.0;
  int greedy_arm = 0;
  std::vector<double> weights;  // simplex over arms; one-hot when unregularized
  bool clipped = false;         // some s_hat fell outside [-S, S]
};

/// Piecewise-constant (floor) interpolation: slice floor(t/dt), per-pair
/// floor(s_hat/ds), floor(q_hat/dq); exact node hits snap within 1e-9
/// relative so rescaled integer states land on their own node.
GridLookup lookup(const GridValueFunction& v, double t, const double* s_hat,
                  const double* q_hat);

/// Text dump: header "K Nt Ns Nq S lambda scheme", one row per node
/// "l i... j... value action" (or per-arm weights when regularized).
void dump_grid(const GridValueFunction& v, const std::string& path);
GridValueFunction load_grid(const std::string& path);

}  // namespace bhjb
