// Command-line front end: exact backward induction, grid solves of the
// limiting equation, regret sweeps and convergence studies.

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "bandit_hjb/errors.hpp"
#include "bandit_hjb/exact_dp.hpp"
#include "bandit_hjb/hjb_solver.hpp"
#include "bandit_hjb/sweeps.hpp"

namespace {

using namespace bhjb;

std::vector<std::int64_t> parse_int_list(const std::string& csv) {
  std::vector<std::int64_t> out;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stoll(tok));
  if (out.empty()) throw ConfigError("empty integer list");
  return out;
}

BernoulliSupport parse_support(const std::string& name) {
  if (name == "zero-one") return BernoulliSupport::zero_one;
  if (name == "pm-gamma") return BernoulliSupport::pm_gamma;
  throw ConfigError("unknown support '" + name + "' (zero-one | pm-gamma)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian bandits via backward induction and limiting-equation grid solves"};
  app.require_subcommand(1);

  // dp-exact
  auto* dp = app.add_subcommand("dp-exact", "one-armed backward induction, dumped as text");
  std::int64_t dp_n = 100;
  std::string dp_prior = "1,1";
  double dp_mu2 = 0.5;
  std::string dp_support = "zero-one";
  double dp_gamma = 1.0;
  std::string dp_dump;
  double dp_cap_gb = 2.0;
  dp->add_option("--n", dp_n, "horizon")->required();
  dp->add_option("--prior", dp_prior, "Beta hyperparameters alpha,beta")->required();
  dp->add_option("--mu2", dp_mu2, "known arm's per-round reward");
  dp->add_option("--support", dp_support, "zero-one | pm-gamma");
  dp->add_option("--gamma", dp_gamma, "payout magnitude for pm-gamma support");
  dp->add_option("--dump", dp_dump, "output table path")->required();
  dp->add_option("--memory-cap-gb", dp_cap_gb, "capacity guard");

  // solve-hjb
  auto* hj = app.add_subcommand("solve-hjb", "finite-difference solve of a limit model");
  std::string hj_model;
  int hj_Nt = 100, hj_Ns = -1, hj_Nq = -1;
  double hj_S = -1.0, hj_lambda = 0.0;
  std::string hj_scheme = "auto";
  std::string hj_dump;
  double hj_cap_gb = 2.0;
  hj->add_option("--model", hj_model, "limit model spec file")->required();
  hj->add_option("--Nt", hj_Nt, "time slices");
  hj->add_option("--Ns", hj_Ns, "reward nodes per side (default: S/dt heuristic)");
  hj->add_option("--Nq", hj_Nq, "pull-count nodes (default: Nt)");
  hj->add_option("--S", hj_S, "reward cutoff (default: 1 for linear scaling, 4 for sqrt)");
  hj->add_option("--scheme", hj_scheme, "diffusive | deterministic | auto");
  hj->add_option("--lambda", hj_lambda, "entropy regularization (0 = off)");
  hj->add_option("--dump", hj_dump, "output grid path")->required();
  hj->add_option("--memory-cap-gb", hj_cap_gb, "capacity guard");

  // regret
  auto* rg = app.add_subcommand("regret", "pseudo-regret sweep over an environment grid");
  std::string rg_config;
  std::vector<std::string> rg_policies;
  std::int64_t rg_seed = -1;
  std::string rg_out;
  int rg_threads = -1;
  rg->add_option("--config", rg_config, "experiment spec file")->required();
  rg->add_option("--policies", rg_policies,
                 "policy tokens: bayes | bayes-reg:<l> | grid:<dump> | ts | ucb:<d> | "
                 "ucb-lin:<l> | dp:<dump> | uniform (default: bayes ts ucb)")
      ->expected(-1);
  rg->add_option("--seed", rg_seed, "master seed override");
  rg->add_option("--out", rg_out, "output CSV path")->required();
  rg->add_option("--threads", rg_threads, "episode-level threads (0 = hardware)");

  // converge
  auto* cv = app.add_subcommand("converge", "backward induction vs the limit / grid solves");
  std::string cv_mode = "exact";
  std::string cv_ns = "16,32,64,128";
  std::string cv_Ns = "50,500";
  std::string cv_scaling = "sqrt";
  std::string cv_out;
  bool cv_reachable = false;
  cv->add_option("--mode", cv_mode, "exact | numeric");
  cv->add_option("--ns", cv_ns, "horizon list");
  cv->add_option("--Ns", cv_Ns, "grid sizes (numeric mode)");
  cv->add_option("--scaling", cv_scaling, "sqrt | linear");
  cv->add_option("--out", cv_out, "output CSV path")->required();
  cv->add_flag("--reachable-only", cv_reachable, "average over reachable states only");

  try {
    app.parse(argc, argv);

    if (dp->parsed()) {
      std::istringstream in(dp_prior);
      std::string a, b;
      if (!std::getline(in, a, ',') || !std::getline(in, b, ','))
        throw ConfigError("--prior wants alpha,beta");
      DpOptions opts;
      opts.memory_cap_bytes = static_cast<std::uint64_t>(dp_cap_gb * 1024.0 * 1024.0 * 1024.0);
      const auto table = solve_one_armed_bernoulli(dp_n, {std::stod(a), std::stod(b)}, dp_mu2,
                                                   parse_support(dp_support), dp_gamma, opts);
      dump_dp_table(table, dp_dump);
      std::printf("dp-exact: n=%lld root value %.12g -> %s\n", static_cast<long long>(dp_n),
                  table.root_value(), dp_dump.c_str());
      return 0;
    }

    if (hj->parsed()) {
      const auto spec = model_spec_from_file(hj_model);
      const LimitModel model = spec.build_limit();
      if (model.denominator_clamped)
        std::fprintf(stderr,
                     "note: a drift denominator constant is ~0; the evaluator floors it near "
                     "q_hat = 0\n");
      GridSpec grid;
      grid.N_t = hj_Nt;
      grid.N_q = hj_Nq > 0 ? hj_Nq : hj_Nt;
      grid.S = hj_S > 0.0 ? hj_S
                          : (spec.scaling.family == ScalingFactor::Family::linear_n ? 1.0 : 4.0);
      // default mesh: ds = dt for transport-only models, ds = sqrt(dt) (the
      // diffusion-stable spacing) otherwise
      const double ds_default = model.deterministic
                                    ? 1.0 / hj_Nt
                                    : 1.0 / std::sqrt(static_cast<double>(hj_Nt));
      grid.N_s = hj_Ns > 0 ? hj_Ns : std::max(1, static_cast<int>(std::floor(grid.S / ds_default)));
      SolverOptions opts;
      opts.memory_cap_bytes = static_cast<std::uint64_t>(hj_cap_gb * 1024.0 * 1024.0 * 1024.0);
      GridValueFunction v;
      if (hj_scheme == "auto")
        v = solve_hjb(model, grid, hj_lambda, opts);
      else if (hj_scheme == "diffusive")
        v = hj_lambda > 0.0 ? solve_regularized(model, grid, hj_lambda, opts)
                            : solve_diffusive(model, grid, opts);
      else if (hj_scheme == "deterministic")
        v = hj_lambda > 0.0 ? solve_regularized(model, grid, hj_lambda, opts)
                            : solve_deterministic(model, grid, opts);
      else
        throw ConfigError("unknown scheme '" + hj_scheme + "'");
      dump_grid(v, hj_dump);
      std::printf("solve-hjb: %s scheme, %lld nodes/slice, %d slices -> %s\n",
                  v.scheme == Scheme::diffusive ? "diffusive" : "deterministic",
                  static_cast<long long>(v.nodes_per_slice), grid.N_t + 1, hj_dump.c_str());
      return 0;
    }

    if (rg->parsed()) {
      ExperimentConfig cfg = ExperimentConfig::from_file(rg_config);
      if (rg_seed >= 0) cfg.seed = static_cast<std::uint64_t>(rg_seed);
      if (rg_threads >= 0) cfg.threads = rg_threads;
      if (rg_policies.empty()) rg_policies = {"bayes", "ts", "ucb"};
      const auto report = regret_sweep(cfg, rg_policies);
      emit_csv(report, rg_out);
      int failed = 0;
      for (const auto& row : report.rows) failed += row.failed ? 1 : 0;
      std::printf("regret: %zu rows (%d failed cells) -> %s\n", report.rows.size(), failed,
                  rg_out.c_str());
      return 0;
    }

    if (cv->parsed()) {
      OneArmedSetup setup = default_convergence_setup();
      setup.reachable_only = cv_reachable;
      const auto f = ScalingFactor::from_name(cv_scaling);
      const auto ns = parse_int_list(cv_ns);
      ConvergenceReport report;
      if (cv_mode == "exact") {
        report = convergence_exact(ns, f, setup);
      } else if (cv_mode == "numeric") {
        std::vector<int> Ns;
        for (const auto N : parse_int_list(cv_Ns)) Ns.push_back(static_cast<int>(N));
        report = convergence_numeric(ns, Ns, f, setup);
      } else {
        throw ConfigError("unknown mode '" + cv_mode + "' (exact | numeric)");
      }
      emit_csv(report, cv_out);
      std::printf("converge: %zu rows -> %s\n", report.rows.size(), cv_out.c_str());
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const StabilityError& e) {
    std::fprintf(stderr, "stability refusal: %s\n", e.what());
    return 2;
  } catch (const CapacityError& e) {
    std::fprintf(stderr, "capacity error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
