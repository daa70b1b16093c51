// graphsupou: simulate and fit graph supOU processes.

#include "commands.hpp"

#include "graphsupou/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <stdexcept>

using namespace graphsupou::cli;

namespace {

void add_net(CLI::App* cmd, NetOptions& net, bool required = true) {
  auto* opt = cmd->add_option("--net", net.path, "edge-list file (1-based node pairs)");
  if (required) opt->required();
  cmd->add_flag("--directed", net.directed, "treat edges as directed (from -> to)");
}

void add_model(CLI::App* cmd, ModelOptions& m) {
  cmd->add_option("--family", m.family, "mixing family: gamma, dirac (ou) or sumexp")->capture_default_str();
  cmd->add_option("--alpha", m.alpha, "Gamma shape, > 1")->capture_default_str();
  cmd->add_option("--lambda", m.lambda, "Dirac rate")->capture_default_str();
  cmd->add_option("--weights", m.weights, "SumExp weights (sum to 1)")->delimiter(',')->capture_default_str();
  cmd->add_option("--rates", m.rates, "SumExp rates")->delimiter(',')->capture_default_str();
  cmd->add_option("--c", m.c, "network ratio theta1/theta2, |c| < 1")->capture_default_str();
}

void add_levy(CLI::App* cmd, LevyOptions& l) {
  cmd->add_option("--rate", l.rate, "jump arrival rate")->capture_default_str();
  cmd->add_option("--jumps", l.jumps, "jump law: gauss-iid, gauss or constant")->capture_default_str();
  cmd->add_option("--jump-var", l.jump_var, "jump variance per coordinate (gauss laws)")->capture_default_str();
  cmd->add_option("--jump-mean", l.jump_mean, "jump mean (gauss)")->delimiter(',');
  cmd->add_option("--jump-value", l.jump_value, "jump vector (constant)")->delimiter(',');
}

void add_sim(CLI::App* cmd, SimOptions& s) {
  cmd->add_option("--delta", s.delta, "observation spacing")->capture_default_str();
  cmd->add_option("--n", s.n, "number of observations")->capture_default_str();
  cmd->add_option("--seed", s.seed, "random seed")->capture_default_str();
  cmd->add_option("--burn-in", s.burn_in, "pre-sample horizon; 0 chooses it from --eps and --quantile")
      ->capture_default_str();
  cmd->add_option("--eps", s.eps, "truncation tolerance")->capture_default_str();
  cmd->add_option("--quantile", s.quantile, "quantile of theta2 used for the burn-in")->capture_default_str();
  cmd->add_option("--max-burn-in", s.max_burn_in, "cap on the burn-in horizon")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and estimation of Levy-driven graph supOU processes"};
  app.require_subcommand(1);
  app.set_config("--config", "", "config file (TOML/INI key = value; flags take precedence)");

  NetOptions net_cmd;
  auto* network = app.add_subcommand("network", "summarise a network file");
  add_net(network, net_cmd);

  SimulateCmd sim_cmd;
  auto* simulate = app.add_subcommand("simulate", "simulate a sample path");
  add_net(simulate, sim_cmd.net);
  add_model(simulate, sim_cmd.model);
  add_levy(simulate, sim_cmd.levy);
  add_sim(simulate, sim_cmd.sim);
  simulate->add_option("--out", sim_cmd.out, "output CSV (metadata in <out>.meta)")->capture_default_str();

  FitCmd fit_cmd;
  auto* fit = app.add_subcommand("fit", "two-step (and optionally GMM) fit of a path CSV");
  fit->add_option("--path", fit_cmd.path, "path CSV")->required();
  add_net(fit, fit_cmd.net, false);
  fit->add_option("--delta", fit_cmd.delta, "observation spacing (default: sidecar, else 1)");
  fit->add_option("--families", fit_cmd.families, "families to fit, e.g. gamma,dirac,sumexp2")
      ->delimiter(',')
      ->capture_default_str();
  fit->add_option("--n-star", fit_cmd.n_star, "lag window N*")->capture_default_str();
  fit->add_option("--sweep", fit_cmd.sweep, "lag windows for the stabilisation sweep (from:to:step or list; empty skips)")
      ->capture_default_str();
  fit->add_option("--curve-max", fit_cmd.curve_max, "largest lag in lags.csv")->capture_default_str();
  fit->add_flag("--gmm", fit_cmd.gmm, "also run GMM warm-started at the two-step fit");
  fit->add_option("--gmm-m", fit_cmd.gmm_m, "largest GMM moment lag (>= 2)")->capture_default_str();
  fit->add_option("--gmm-max-iter", fit_cmd.gmm_max_iter, "simplex iterations per GMM run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit->add_option("--sigma", fit_cmd.sigma, "GMM sigma2_L structure: scalar, diagonal or full")->capture_default_str();
  fit->add_flag("--one-stage", fit_cmd.one_stage, "skip the efficient second GMM stage");
  fit->add_option("--out", fit_cmd.out, "output directory")->capture_default_str();

  McCmd mc_cmd;
  auto* mc = app.add_subcommand("mc-study", "Monte Carlo study of the two-step estimator");
  add_net(mc, mc_cmd.net);
  add_model(mc, mc_cmd.model);
  add_levy(mc, mc_cmd.levy);
  add_sim(mc, mc_cmd.sim);
  mc->add_option("--reps", mc_cmd.reps, "replications")->capture_default_str();
  mc->add_option("--jobs", mc_cmd.jobs, "worker threads")->capture_default_str();
  mc->add_option("--lags", mc_cmd.lags, "lag windows (from:to:step or list)")->capture_default_str();
  mc->add_option("--window", mc_cmd.window, "lag window for the Levy-moment estimates")->capture_default_str();
  mc->add_option("--out", mc_cmd.out, "output directory")->capture_default_str();

  PreprocessCmd pre_cmd;
  auto* pre = app.add_subcommand("preprocess", "remove seasonal means and a moving-average trend");
  pre->add_option("--in", pre_cmd.in, "raw CSV: time column then one column per node")->required();
  pre->add_option("--out", pre_cmd.out, "output CSV")->capture_default_str();
  pre->add_option("--periods", pre_cmd.periods, "seasonal periods in samples")->delimiter(',')->capture_default_str();
  pre->add_option("--trend-window", pre_cmd.trend_window, "moving-average width; 0 disables")->capture_default_str();
  pre->add_option("--max-missing", pre_cmd.max_missing, "largest fraction of missing values per column")
      ->capture_default_str();
  pre->add_flag("--no-unit-check", pre_cmd.no_unit_check, "do not warn about values outside [0, 1]");

  ZetaCmd zeta_cmd;
  auto* zeta = app.add_subcommand("zeta", "tabulate the weak-dependence bound");
  add_net(zeta, zeta_cmd.net);
  add_model(zeta, zeta_cmd.model);
  zeta->add_option("--mu", zeta_cmd.mu, "mu_L (broadcast when one value)")->delimiter(',')->capture_default_str();
  zeta->add_option("--sigma2", zeta_cmd.sigma2, "sigma2_L = s I")->capture_default_str();
  zeta->add_option("--C", zeta_cmd.C, "norm-equivalence constant")->capture_default_str();
  zeta->add_option("--r-min", zeta_cmd.r_min, "smallest r")->capture_default_str();
  zeta->add_option("--r-max", zeta_cmd.r_max, "largest r")->capture_default_str();
  zeta->add_option("--points", zeta_cmd.points, "log-spaced grid points")->capture_default_str();
  zeta->add_option("--fit-from", zeta_cmd.fit_from, "slope fitted over r >= this")->capture_default_str();
  zeta->add_option("--out", zeta_cmd.out, "output CSV (stdout when empty)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*network) return cmd_network(net_cmd);
    if (*simulate) return cmd_simulate(sim_cmd);
    if (*fit) return cmd_fit(fit_cmd);
    if (*mc) return cmd_mc_study(mc_cmd);
    if (*pre) return cmd_preprocess(pre_cmd);
    if (*zeta) return cmd_zeta(zeta_cmd);
  } catch (const graphsupou::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const graphsupou::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
