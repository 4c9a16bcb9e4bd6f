#include "bandit_hjb/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bandit_hjb/errors.hpp"

namespace bhjb {
namespace {

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

std::int64_t GridValueFunction::node_index(const std::int64_t* i, const std::int64_t* j) const {
  const std::int64_t Ls = 2 * grid.N_s + 1;
  const std::int64_t Lq = grid.N_q + 1;
  std::int64_t q_flat = 0, s_flat = 0;
  for (int p = 0; p < pairs; ++p) {
    q_flat = q_flat * Lq + j[p];
    s_flat = s_flat * Ls + (i[p] + grid.N_s);
  }
  return q_flat * ipow(Ls, pairs) + s_flat;
}

GridLookup lookup(const GridValueFunction& v, double t, const double* s_hat,
                  const double* q_hat) {
  GridLookup out;
  std::vector<std::int64_t> i(static_cast<std::size_t>(v.pairs));
  std::vector<std::int64_t> j(static_cast<std::size_t>(v.pairs));
  std::int64_t l = floor_index(t / v.grid.dt());
  if (l < 0) l = 0;
  if (l > v.grid.N_t) l = v.grid.N_t;
  for (int p = 0; p < v.pairs; ++p) {
    std::int64_t ip = floor_index(s_hat[p] / v.grid.ds());
    if (ip < -v.grid.N_s) {
      ip = -v.grid.N_s;
      out.clipped = true;
    }
    if (ip > v.grid.N_s) {
      ip = v.grid.N_s;
      out.clipped = true;
    }
    std::int64_t jp = floor_index(q_hat[p] / v.grid.dq());
    if (jp < 0) jp = 0;
    if (jp > v.grid.N_q) jp = v.grid.N_q;
    i[static_cast<std::size_t>(p)] = ip;
    j[static_cast<std::size_t>(p)] = jp;
  }
  const auto idx = static_cast<std::size_t>(v.node_index(i.data(), j.data()));

  if (!v.has_values() || !v.has_policy())
    throw ConfigError("grid lookup: value function was solved without persistence");
  out.value = v.values[static_cast<std::size_t>(l)][idx];
  out.greedy_arm = v.greedy[static_cast<std::size_t>(l)][idx];
  out.weights.assign(static_cast<std::size_t>(v.arms), 0.0);
  if (v.lambda > 0.0 && !v.weights.empty()) {
    const double* w = v.weights[static_cast<std::size_t>(l)].data() +
                      static_cast<std::size_t>(v.arms) * idx;
    for (int k = 0; k < v.arms; ++k) out.weights[static_cast<std::size_t>(k)] = w[k];
  } else {
    out.weights[static_cast<std::size_t>(out.greedy_arm)] = 1.0;
  }
  return out;
}

void dump_grid(const GridValueFunction& v, const std::string& path) {
  if (!v.has_values() || !v.has_policy())
    throw ConfigError("grid dump: value function was solved without persistence");
  std::ofstream out(path);
  if (!out) throw ConfigError("grid dump: cannot open " + path);
  out << v.arms << ' ' << v.grid.N_t << ' ' << v.grid.N_s << ' ' << v.grid.N_q << ' ' << v.grid.S
      << ' ' << v.lambda << ' '
      << (v.scheme == Scheme::diffusive ? "diffusive" : "deterministic") << '\n';
  const std::int64_t Ls = 2 * v.grid.N_s + 1;
  const std::int64_t Lq = v.grid.N_q + 1;
  char buf[64];
  std::vector<std::int64_t> i(static_cast<std::size_t>(v.pairs));
  std::vector<std::int64_t> j(static_cast<std::size_t>(v.pairs));
  for (int l = 0; l <= v.grid.N_t; ++l) {
    for (std::int64_t node = 0; node < v.nodes_per_slice; ++node) {
      std::int64_t rest = node;
      std::int64_t s_flat = rest % ipow(Ls, v.pairs);
      std::int64_t q_flat = rest / ipow(Ls, v.pairs);
      for (int p = v.pairs - 1; p >= 0; --p) {
        i[static_cast<std::size_t>(p)] = s_flat % Ls - v.grid.N_s;
        s_flat /= Ls;
        j[static_cast<std::size_t>(p)] = q_flat % Lq;
        q_flat /= Lq;
      }
      out << l;
      for (int p = 0; p < v.pairs; ++p) out << ' ' << i[static_cast<std::size_t>(p)];
      for (int p = 0; p < v.pairs; ++p) out << ' ' << j[static_cast<std::size_t>(p)];
      std::snprintf(buf, sizeof buf, " %.17g",
                    v.values[static_cast<std::size_t>(l)][static_cast<std::size_t>(node)]);
      out << buf;
      if (v.lambda > 0.0) {
        const double* w = v.weights[static_cast<std::size_t>(l)].data() +
                          static_cast<std::size_t>(v.arms) * static_cast<std::size_t>(node);
        for (int k = 0; k < v.arms; ++k) {
          std::snprintf(buf, sizeof buf, " %.17g", w[k]);
          out << buf;
        }
      } else {
        out << ' '
            << static_cast<int>(
                   v.greedy[static_cast<std::size_t>(l)][static_cast<std::size_t>(node)]);
      }
      out << '\n';
    }
  }
}

GridValueFunction load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("grid load: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("grid load: empty file " + path);
  std::istringstream hs(header);
  GridValueFunction v;
  std::string scheme;
  if (!(hs >> v.arms >> v.grid.N_t >> v.grid.N_s >> v.grid.N_q >> v.grid.S >> v.lambda >> scheme))
    throw ConfigError("grid load: bad header in " + path);
  if (scheme == "diffusive")
    v.scheme = Scheme::diffusive;
  else if (scheme == "deterministic")
    v.scheme = Scheme::deterministic;
  else
    throw ConfigError("grid load: unknown scheme '" + scheme + "'");

  // Pair count from the first row's width: 1 + 2*pairs + width, where width is
  // 1 (greedy action) or arms (softmax weights).
  std::string first;
  if (!std::getline(in, first)) throw ConfigError("grid load: no rows in " + path);
  {
    std::istringstream fs(first);
    double tok;
    int cols = 0;
    while (fs >> tok) ++cols;
    const int width = v.lambda > 0.0 ? v.arms + 1 : 2;  // value + action/weights
    v.pairs = (cols - width - 1) / 2;
    if (v.pairs < 1 || cols != 1 + 2 * v.pairs + width)
      throw ConfigError("grid load: unexpected row width in " + path);
  }
  if (v.pairs == v.arms) {
    for (int k = 0; k < v.arms; ++k) v.arm_pair.push_back(k);
  } else {
    // Stateless arms follow the paired ones (one-armed dumps).
    for (int k = 0; k < v.arms; ++k) v.arm_pair.push_back(k < v.pairs ? k : -1);
  }

  const std::int64_t Ls = 2 * v.grid.N_s + 1;
  const std::int64_t Lq = v.grid.N_q + 1;
  v.nodes_per_slice = ipow(Ls, v.pairs) * ipow(Lq, v.pairs);
  v.values.assign(static_cast<std::size_t>(v.grid.N_t + 1),
                  std::vector<double>(static_cast<std::size_t>(v.nodes_per_slice), 0.0));
  v.greedy.assign(static_cast<std::size_t>(v.grid.N_t + 1),
                  std::vector<std::uint8_t>(static_cast<std::size_t>(v.nodes_per_slice), 0));
  if (v.lambda > 0.0)
    v.weights.assign(
        static_cast<std::size_t>(v.grid.N_t + 1),
        std::vector<double>(static_cast<std::size_t>(v.nodes_per_slice) * v.arms, 0.0));

  std::vector<std::int64_t> i(static_cast<std::size_t>(v.pairs));
  std::vector<std::int64_t> j(static_cast<std::size_t>(v.pairs));
  std::string line = first;
  do {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int l;
    if (!(ls >> l)) throw ConfigError("grid load: bad row '" + line + "'");
    for (int p = 0; p < v.pairs; ++p) ls >> i[static_cast<std::size_t>(p)];
    for (int p = 0; p < v.pairs; ++p) ls >> j[static_cast<std::size_t>(p)];
    double value;
    ls >> value;
    const auto idx = static_cast<std::size_t>(v.node_index(i.data(), j.data()));
    v.values[static_cast<std::size_t>(l)][idx] = value;
    if (v.lambda > 0.0) {
      double best = -1.0;
      for (int k = 0; k < v.arms; ++k) {
        double w;
        ls >> w;
        v.weights[static_cast<std::size_t>(l)][static_cast<std::size_t>(v.arms) * idx +
                                               static_cast<std::size_t>(k)] = w;
        if (w > best) {
          best = w;
          v.greedy[static_cast<std::size_t>(l)][idx] = static_cast<std::uint8_t>(k);
        }
      }
    } else {
      int action;
      ls >> action;
      v.greedy[static_cast<std::size_t>(l)][idx] = static_cast<std::uint8_t>(action);
    }
  } while (std::getline(in, line));
  return v;
}

}  // namespace bhjb
