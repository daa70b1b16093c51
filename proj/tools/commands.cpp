#include "commands.hpp"

#include "graphsupou/empirical.hpp"
#include "graphsupou/errors.hpp"
#include "graphsupou/gmm.hpp"
#include "graphsupou/io.hpp"
#include "graphsupou/linops.hpp"
#include "graphsupou/model.hpp"
#include "graphsupou/montecarlo.hpp"
#include "graphsupou/network.hpp"
#include "graphsupou/preprocess.hpp"
#include "graphsupou/simulate.hpp"
#include "graphsupou/twostep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;

namespace graphsupou::cli {

namespace {

Network load_network(const NetOptions& opt) {
  if (opt.path.empty()) throw ConfigError("a network file is required (--net)");
  if (!fs::exists(opt.path)) throw ConfigError("network file '" + opt.path + "' does not exist");
  return read_edge_list(opt.path, opt.directed);
}

// "sumexp3" -> 3, "sumexp" -> 2
int atom_count(const std::string& label) {
  const std::string digits = label.substr(std::min<std::size_t>(6, label.size()));
  if (digits.empty()) return 2;
  try {
    const int k = std::stoi(digits);
    if (k >= 1) return k;
  } catch (const std::exception&) {
  }
  throw ConfigError("cannot read an atom count from family '" + label + "'");
}

MixingMeasure build_mixing(const ModelOptions& opt) {
  switch (parse_family(opt.family)) {
    case Family::gamma:
      if (!(opt.alpha > 1.0)) throw ConfigError("--alpha must exceed 1");
      return MixingMeasure::gamma(opt.alpha);
    case Family::dirac:
      return MixingMeasure::dirac(opt.lambda);
    case Family::sum_exp: {
      if (opt.weights.size() != opt.rates.size() || opt.weights.empty()) {
        throw ConfigError("--weights and --rates must have the same, nonzero length");
      }
      std::vector<ExpAtom> atoms;
      for (std::size_t i = 0; i < opt.weights.size(); ++i) atoms.push_back({opt.weights[i], opt.rates[i]});
      return MixingMeasure::sum_exp(atoms);
    }
  }
  throw ConfigError("unknown family");
}

Eigen::VectorXd broadcast(const std::vector<double>& v, int d, const std::string& what) {
  if (v.size() == 1) return Eigen::VectorXd::Constant(d, v[0]);
  if (static_cast<int>(v.size()) != d) throw ConfigError(what + " needs 1 or " + std::to_string(d) + " entries");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), d);
}

CPPLevySpec build_levy(const LevyOptions& opt, int d) {
  if (opt.jumps == "gauss-iid") return CPPLevySpec::gaussian_iid(d, opt.rate, opt.jump_var);
  if (opt.jumps == "gauss") {
    const Eigen::VectorXd m = opt.jump_mean.empty() ? Eigen::VectorXd::Zero(d) : broadcast(opt.jump_mean, d, "--jump-mean");
    return CPPLevySpec::gaussian(opt.rate, m, opt.jump_var * Eigen::MatrixXd::Identity(d, d));
  }
  if (opt.jumps == "constant") {
    if (opt.jump_value.empty()) throw ConfigError("--jumps constant needs --jump-value");
    return CPPLevySpec::constant(opt.rate, broadcast(opt.jump_value, d, "--jump-value"));
  }
  throw ConfigError("unknown jump law '" + opt.jumps + "' (gauss-iid, gauss, constant)");
}

SimConfig sim_config(const SimOptions& opt) {
  SimConfig cfg;
  cfg.burn_in_horizon = opt.burn_in;
  cfg.residual_tolerance = opt.eps;
  cfg.quantile = opt.quantile;
  cfg.max_burn_in = opt.max_burn_in;
  cfg.seed = opt.seed;
  return cfg;
}

void check_model(const ModelOptions& model, const SimOptions& sim) {
  if (!(std::abs(model.c) < 1.0)) throw ConfigError("--c must satisfy |c| < 1");
  if (!(sim.delta > 0.0)) throw ConfigError("--delta must be positive");
  if (sim.n < 1) throw ConfigError("--n must be at least 1");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void describe_mixing(KeyValues& kv, const MixingMeasure& pi) {
  kv.set("family", family_name(pi.family()));
  kv.set("mixing", pi.describe());
  if (const auto* g = std::get_if<GammaLaw>(&pi.law())) {
    kv.set("alpha", g->alpha);
  } else if (const auto* d = std::get_if<DiracLaw>(&pi.law())) {
    kv.set("lambda", d->rate);
  } else {
    const auto& atoms = std::get<SumExpLaw>(pi.law()).atoms;
    Eigen::VectorXd w(atoms.size());
    Eigen::VectorXd r(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      w(i) = atoms[i].weight;
      r(i) = atoms[i].rate;
    }
    kv.set("weights", format_vector(w));
    kv.set("rates", format_vector(r));
  }
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

fs::path sidecar_for(const fs::path& csv) { return fs::path(csv.string() + ".meta"); }

std::string family_label(Family f, int atoms) {
  return f == Family::sum_exp ? "sumexp" + std::to_string(atoms) : family_name(f);
}

Eigen::VectorXd theta_truth(const MixingMeasure& pi) {
  if (const auto* g = std::get_if<GammaLaw>(&pi.law())) return Eigen::VectorXd::Constant(1, g->alpha);
  if (const auto* d = std::get_if<DiracLaw>(&pi.law())) return Eigen::VectorXd::Constant(1, d->rate);
  const auto& atoms = std::get<SumExpLaw>(pi.law()).atoms;
  const auto K = static_cast<Eigen::Index>(atoms.size());
  Eigen::VectorXd out(2 * K);
  for (Eigen::Index i = 0; i < K; ++i) {
    out(i) = atoms[i].weight;
    out(K + i) = atoms[i].rate;
  }
  return out;
}

FitDocument twostep_document(const TwoStepFit& fit, const Network& net, const EmpiricalMoments& em) {
  FitDocument doc;
  doc.values.set("method", std::string("twostep"));
  describe_mixing(doc.values, fit.pi);
  doc.values.set("c", fit.c_hat);
  doc.values.set("n_star", static_cast<long long>(fit.n_star));
  doc.values.set("loss", fit.loss_value);
  doc.values.set("converged", std::string(fit.converged ? "true" : "false"));
  doc.values.set("identifiable", std::string(fit.identifiable ? "true" : "false"));
  doc.values.set("a_star", net.a_star());
  doc.values.set("N", static_cast<long long>(em.N));
  doc.values.set("delta", em.delta);
  doc.values.set("mu_L", format_vector(fit.mu_L_hat));
  doc.values.set("sigma2_L_diag", format_vector(fit.sigma2_L_hat.diagonal()));
  doc.add_matrix("sigma2_L", fit.sigma2_L_hat);
  Eigen::MatrixXd lags(fit.lags.size(), 3);
  for (std::size_t i = 0; i < fit.lags.size(); ++i) {
    lags.row(i) << static_cast<double>(fit.lags[i].h), fit.lags[i].l_hat, fit.lags[i].rho;
  }
  doc.add_matrix("lags", lags);
  return doc;
}

FitDocument gmm_document(const GmmFit& fit) {
  FitDocument doc;
  doc.values.set("method", std::string("gmm"));
  const ModelParams p = fit.params();
  describe_mixing(doc.values, p.pi);
  doc.values.set("c", p.c);
  doc.values.set("sigma_structure", sigma_structure_name(fit.layout.sigma));
  doc.values.set("m", static_cast<long long>((fit.jacobian.rows() - fit.layout.d) / vech_size(fit.layout.d) - 1));
  doc.values.set("N", static_cast<long long>(fit.N));
  std::string names;
  for (const auto& n : fit.layout.names()) names += (names.empty() ? "" : ",") + n;
  doc.values.set("parameters", names);
  doc.values.set("xi", format_vector(fit.xi_hat));
  doc.values.set("std_errors", format_vector(fit.std_errors));
  doc.values.set("objective", fit.objective_value);
  doc.values.set("objective_stage1", fit.objective_stage1);
  doc.values.set("converged", std::string(fit.converged ? "true" : "false"));
  doc.values.set("rank_deficient", std::string(fit.rank_deficient ? "true" : "false"));
  std::string weak;
  for (const auto& n : fit.weak_directions) weak += (weak.empty() ? "" : ",") + n;
  doc.values.set("weak_directions", weak);
  doc.add_matrix("xi_stage1", fit.xi_stage1);
  doc.add_matrix("asymptotic_cov", fit.asymptotic_cov);
  doc.add_matrix("jacobian", fit.jacobian);
  if (fit.V_N.rows() <= 500) {
    doc.add_matrix("V_N", fit.V_N);
    doc.add_matrix("F_sigma", fit.F_sigma_hat);
  }
  return doc;
}

}  // namespace

std::vector<long long> parse_lags(const std::string& spec) {
  std::vector<long long> out;
  try {
    if (spec.find(':') != std::string::npos) {
      std::vector<long long> parts;
      std::stringstream ss(spec);
      std::string item;
      while (std::getline(ss, item, ':')) parts.push_back(std::stoll(item));
      if (parts.size() < 2 || parts.size() > 3) throw ConfigError("lag range must be 'from:to' or 'from:to:step'");
      const long long step = parts.size() == 3 ? parts[2] : 1;
      if (step < 1) throw ConfigError("lag step must be positive");
      for (long long h = parts[0]; h <= parts[1]; h += step) out.push_back(h);
    } else {
      std::stringstream ss(spec);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
    }
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse lag specification '" + spec + "'");
  }
  if (out.empty()) throw ConfigError("lag specification '" + spec + "' is empty");
  for (long long h : out) {
    if (h < 1) throw ConfigError("lags must be positive");
  }
  return out;
}

int cmd_network(const NetOptions& opt) {
  std::cout << summary_report(load_network(opt));
  return 0;
}

int cmd_simulate(const SimulateCmd& opt) {
  const Network net = load_network(opt.net);
  check_model(opt.model, opt.sim);
  const MixingMeasure pi = build_mixing(opt.model);
  const CPPLevySpec levy = build_levy(opt.levy, net.size());
  const SimConfig cfg = sim_config(opt.sim);

  const SamplePath path = simulate_path(net, pi, opt.model.c, levy, opt.sim.delta, opt.sim.n, cfg);
  print_warnings(path.warnings);

  const fs::path out(opt.out);
  write_path_csv(out, path);
  KeyValues meta;
  meta.set("network", fs::absolute(opt.net.path).string());
  meta.set("directed", std::string(opt.net.directed ? "true" : "false"));
  describe_mixing(meta, pi);
  meta.set("c", opt.model.c);
  meta.set("jump_rate", levy.rate);
  meta.set("jumps", opt.levy.jumps);
  const LevyMomentSpec mom = levy.moments();
  meta.set("mu_L", format_vector(mom.mu_L));
  meta.set("sigma2_L_diag", format_vector(mom.sigma2_L.diagonal()));
  meta.set("delta", path.delta);
  meta.set("N", static_cast<long long>(path.N()));
  meta.set("d", static_cast<long long>(path.d()));
  meta.set("seed", std::to_string(path.seed));
  meta.set("generator", path.generator);
  meta.set("burn_in_horizon", path.burn_in_horizon);
  meta.set("residual_tolerance", cfg.residual_tolerance);
  meta.set("jumps_drawn", static_cast<long long>(path.jumps));
  meta.set("created", utc_timestamp());
  write_key_values(sidecar_for(out), meta);
  std::cout << "wrote " << out.string() << " (" << path.N() << " x " << path.d() << ", " << path.jumps
            << " jumps)\n";
  return 0;
}

int cmd_fit(const FitCmd& opt) {
  if (opt.path.empty()) throw ConfigError("a path CSV is required (--path)");
  if (!fs::exists(opt.path)) throw ConfigError("path file '" + opt.path + "' does not exist");
  const fs::path meta_file = sidecar_for(opt.path);
  KeyValues meta;
  if (fs::exists(meta_file)) meta = read_key_values(meta_file);

  NetOptions net_opt = opt.net;
  if (net_opt.path.empty()) {
    if (const auto p = meta.get("network")) net_opt.path = *p;
    if (const auto dir = meta.get("directed")) net_opt.directed = net_opt.directed || *dir == "true";
  }
  const Network net = load_network(net_opt);
  double delta = opt.delta;
  if (!(delta > 0.0)) delta = meta.contains("delta") ? meta.get_double("delta") : 1.0;
  std::vector<std::pair<Family, int>> families;
  for (const auto& label : opt.families) {
    const Family f = parse_family(label);
    families.emplace_back(f, f == Family::sum_exp ? atom_count(label) : 1);
  }
  const std::vector<long long> sweep = opt.sweep.empty() ? std::vector<long long>{} : parse_lags(opt.sweep);
  const SigmaStructure sigma = parse_sigma_structure(opt.sigma);

  const SamplePath path = read_path_csv(fs::path(opt.path), delta);
  if (path.d() != net.size()) throw ConfigError("path has " + std::to_string(path.d()) + " columns but the network has " +
                                                std::to_string(net.size()) + " nodes");
  long long h_max = std::max(opt.n_star, opt.curve_max);
  for (long long h : sweep) h_max = std::max(h_max, h);
  h_max = std::min<long long>(h_max, path.N() - 1);
  if (opt.n_star < 1 || opt.n_star > h_max) throw ConfigError("--n-star must lie in [1, N - 1]");
  const EmpiricalMoments em = empirical_moments(path, h_max);

  const fs::path out(opt.out);
  fs::create_directories(out);
  const Eigen::Index curve_max = std::min<long long>(opt.curve_max, h_max);
  const std::vector<LagEigen> curve = leading_eig_series(em, 1, curve_max);
  Table lag_table;
  lag_table.columns = {"h", "l_hat"};
  lag_table.data.resize(curve_max, 2 + static_cast<Eigen::Index>(families.size()));
  for (Eigen::Index i = 0; i < curve_max; ++i) {
    lag_table.data(i, 0) = static_cast<double>(curve[i].h);
    lag_table.data(i, 1) = curve[i].l_hat;
  }

  int column = 2;
  for (const auto& [family, atoms] : families) {
    const std::string label = family_label(family, atoms);
    TwoStepConfig cfg;
    cfg.family = family;
    cfg.atoms = atoms;
    cfg.n_star = opt.n_star;
    const TwoStepFit fit = twostep_fit(em, net, cfg);
    write_fit_document(out / ("fit_" + label + ".txt"), twostep_document(fit, net, em));

    lag_table.columns.push_back("rho_" + label);
    for (Eigen::Index i = 0; i < curve_max; ++i) {
      lag_table.data(i, column) = rho_eigen(fit.pi, fit.c_hat, net.a_star(), static_cast<double>(i + 1), delta);
    }
    ++column;

    std::cout << label << ": " << fit.pi.describe() << ", c = " << fit.c_hat << ", loss = " << fit.loss_value
              << (fit.identifiable ? "" : " (theta and c not separately identified)") << '\n';

    if (!sweep.empty()) {
      Table st;
      st.columns.push_back("window");
      for (const auto& n : fit.theta_names()) st.columns.push_back(n);
      st.columns.push_back("c");
      st.columns.push_back("loss");
      st.data.resize(static_cast<Eigen::Index>(sweep.size()), static_cast<Eigen::Index>(st.columns.size()));
      Eigen::Index row = 0;
      for (long long w : sweep) {
        if (w > h_max) continue;
        TwoStepConfig wc = cfg;
        wc.n_star = w;
        const TwoStepFit f = twostep_fit(em, net, wc);
        const Eigen::VectorXd th = f.theta_hat();
        st.data(row, 0) = static_cast<double>(w);
        st.data.row(row).segment(1, th.size()) = th.transpose();
        st.data(row, 1 + th.size()) = f.c_hat;
        st.data(row, 2 + th.size()) = f.loss_value;
        ++row;
      }
      st.data.conservativeResize(row, Eigen::NoChange);
      write_csv_table(out / ("sweep_" + label + ".csv"), st);
    }

    if (opt.gmm) {
      GmmConfig gc;
      gc.family = family;
      gc.atoms = atoms;
      gc.sigma = sigma;
      gc.m = opt.gmm_m;
      gc.two_stage = !opt.one_stage;
      gc.optimizer.max_iterations = opt.gmm_max_iter;
      const ParamLayout layout{family, atoms, net.size(), sigma};
      try {
        gc.warm_start = pack(layout, ModelParams{fit.pi, fit.c_hat, {fit.mu_L_hat, fit.sigma2_L_hat}});
      } catch (const std::exception&) {
      }
      const GmmFit g = gmm_fit(path, net, gc);
      write_fit_document(out / ("gmm_" + label + ".txt"), gmm_document(g));
      std::cout << label << " gmm: " << g.params().pi.describe() << ", c = " << g.params().c
                << ", objective = " << g.objective_value << (g.rank_deficient ? " (rank deficient)" : "") << '\n';
    }
  }
  write_csv_table(out / "lags.csv", lag_table);
  return 0;
}

int cmd_mc_study(const McCmd& opt) {
  const Network net = load_network(opt.net);
  check_model(opt.model, opt.sim);
  if (opt.reps < 1) throw ConfigError("--reps must be at least 1");
  if (opt.jobs < 1) throw ConfigError("--jobs must be at least 1");
  const MixingMeasure pi = build_mixing(opt.model);
  const CPPLevySpec levy = build_levy(opt.levy, net.size());
  const std::vector<long long> lags = parse_lags(opt.lags);
  if (opt.window < 1) throw ConfigError("--window must be positive");
  long long h_max = opt.window;
  for (long long h : lags) h_max = std::max(h_max, h);
  if (h_max >= opt.sim.n) throw ConfigError("lags must be smaller than --n");

  const int d = net.size();
  const Family family = pi.family();
  const int atoms = family == Family::sum_exp ? static_cast<int>(std::get<SumExpLaw>(pi.law()).atoms.size()) : 1;
  TwoStepConfig base;
  base.family = family;
  base.atoms = atoms;

  // Names: per lag (theta..., c), then mu_L and sigma2_L (row-major) at the window.
  const Eigen::VectorXd th0 = theta_truth(pi);
  std::vector<std::string> theta_names;
  {
    TwoStepFit probe;
    probe.pi = pi;
    theta_names = probe.theta_names();
  }
  const LevyMomentSpec truth_levy = levy.moments();
  std::vector<std::string> names;
  std::vector<double> truth;
  for (long long h : lags) {
    for (std::size_t i = 0; i < theta_names.size(); ++i) {
      names.push_back(theta_names[i] + "@" + std::to_string(h));
      truth.push_back(th0(i));
    }
    names.push_back("c@" + std::to_string(h));
    truth.push_back(opt.model.c);
  }
  for (int i = 0; i < d; ++i) {
    names.push_back("mu_L" + std::to_string(i + 1));
    truth.push_back(truth_levy.mu_L(i));
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      names.push_back("sigma2_L" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
      truth.push_back(truth_levy.sigma2_L(i, j));
    }
  }

  const Estimator estimator = [&](const SamplePath& path) {
    const EmpiricalMoments em = empirical_moments(path, h_max);
    Eigen::VectorXd est(static_cast<Eigen::Index>(names.size()));
    Eigen::Index k = 0;
    for (long long h : lags) {
      TwoStepConfig cfg = base;
      cfg.n_star = h;
      const TwoStepFit f = twostep_fit(em, net, cfg);
      const Eigen::VectorXd th = f.theta_hat();
      est.segment(k, th.size()) = th;
      k += th.size();
      est(k++) = f.c_hat;
    }
    TwoStepConfig cfg = base;
    cfg.n_star = opt.window;
    const TwoStepFit f = twostep_fit(em, net, cfg);
    est.segment(k, d) = f.mu_L_hat;
    k += d;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) est(k++) = f.sigma2_L_hat(i, j);
    }
    return est;
  };

  const fs::path out(opt.out);
  fs::create_directories(out);
  std::ofstream reps_csv(out / "replications.csv");
  std::ofstream failures(out / "failures.txt");
  if (!reps_csv || !failures) throw ConfigError("cannot write to '" + out.string() + "'");
  reps_csv << "replication,seed,ok";
  for (const auto& n : names) reps_csv << ',' << n;
  reps_csv << '\n';

  McConfig mc;
  mc.reps = opt.reps;
  mc.jobs = opt.jobs;
  mc.seed = opt.sim.seed;
  mc.sim = sim_config(opt.sim);
  mc.names = names;
  mc.on_record = [&](const McRecord& r) {
    reps_csv << r.replication << ',' << r.seed << ',' << (r.ok ? 1 : 0);
    for (std::size_t i = 0; i < names.size(); ++i) {
      reps_csv << ',' << (r.ok ? format_double(r.estimates(static_cast<Eigen::Index>(i))) : std::string("nan"));
    }
    reps_csv << '\n';
    reps_csv.flush();
    if (!r.ok) failures << r.replication << ": " << r.error << '\n';
  };

  const auto records = mc_study(net, pi, opt.model.c, levy, opt.sim.delta, opt.sim.n, mc, estimator);
  const McSummary s = summarise(records, names, Eigen::Map<const Eigen::VectorXd>(truth.data(), truth.size()));

  // Per-lag summary of the drift/mixing parameters.
  std::vector<std::string> per_lag = theta_names;
  per_lag.push_back("c");
  Table lt;
  lt.columns.push_back("h");
  for (const auto& p : per_lag) {
    for (const char* stat : {"median", "mae", "rmse"}) lt.columns.push_back(std::string(stat) + "_" + p);
  }
  lt.data.resize(static_cast<Eigen::Index>(lags.size()), static_cast<Eigen::Index>(lt.columns.size()));
  const auto per = static_cast<Eigen::Index>(per_lag.size());
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    lt.data(r, 0) = static_cast<double>(lags[i]);
    for (Eigen::Index p = 0; p < per; ++p) {
      const Eigen::Index k = r * per + p;
      lt.data(r, 1 + 3 * p) = s.median(k);
      lt.data(r, 2 + 3 * p) = s.mae(k);
      lt.data(r, 3 + 3 * p) = s.rmse(k);
    }
  }
  write_csv_table(out / "lag_summary.csv", lt);

  const Eigen::Index levy_offset = static_cast<Eigen::Index>(lags.size()) * per;
  Table levy_t;
  levy_t.columns = {"node", "mu_L_true", "mu_L_median", "sigma2_L_true", "sigma2_L_median"};
  levy_t.data.resize(d, 5);
  Table heat;
  Eigen::MatrixXd heat_m(d, d);
  for (int i = 0; i < d; ++i) {
    heat.columns.push_back("x" + std::to_string(i + 1));
    const Eigen::Index diag = levy_offset + d + i * d + i;
    levy_t.data.row(i) << i + 1, s.truth(levy_offset + i), s.median(levy_offset + i), s.truth(diag), s.median(diag);
    for (int j = 0; j < d; ++j) heat_m(i, j) = s.median(levy_offset + d + i * d + j);
  }
  heat.data = heat_m;
  write_csv_table(out / "levy_summary.csv", levy_t);
  write_csv_table(out / "sigma2_median.csv", heat);

  KeyValues summary;
  summary.set("reps", static_cast<long long>(opt.reps));
  summary.set("succeeded", static_cast<long long>(s.succeeded));
  summary.set("failed", static_cast<long long>(s.failed));
  summary.set("N", opt.sim.n);
  summary.set("seed", std::to_string(opt.sim.seed));
  describe_mixing(summary, pi);
  summary.set("c", opt.model.c);
  summary.set("window", opt.window);
  for (Eigen::Index p = 0; p < per; ++p) {
    Eigen::Index best_rmse = 0;
    Eigen::Index best_mae = 0;
    for (Eigen::Index r = 1; r < static_cast<Eigen::Index>(lags.size()); ++r) {
      if (lt.data(r, 3 + 3 * p) < lt.data(best_rmse, 3 + 3 * p)) best_rmse = r;
      if (lt.data(r, 2 + 3 * p) < lt.data(best_mae, 2 + 3 * p)) best_mae = r;
    }
    summary.set("best_lag_rmse_" + per_lag[p], lags[best_rmse]);
    summary.set("best_lag_mae_" + per_lag[p], lags[best_mae]);
  }
  const auto window_it = std::find(lags.begin(), lags.end(), opt.window);
  if (window_it != lags.end()) {
    const Eigen::Index r = window_it - lags.begin();
    for (Eigen::Index p = 0; p < per; ++p) summary.set("median_" + per_lag[p] + "@window", s.median(r * per + p));
  }
  summary.set("median_mu_L", format_vector(levy_t.data.col(2)));
  summary.set("median_sigma2_L_diag", format_vector(levy_t.data.col(4)));
  write_key_values(out / "summary.txt", summary);
  write_key_values(std::cout, summary);
  return s.succeeded > 0 ? 0 : 1;
}

int cmd_preprocess(const PreprocessCmd& opt) {
  if (opt.in.empty()) throw ConfigError("an input CSV is required (--in)");
  if (!fs::exists(opt.in)) throw ConfigError("input file '" + opt.in + "' does not exist");
  PreprocessConfig cfg;
  cfg.periods.clear();
  for (long long p : opt.periods) {
    if (p < 1) throw ConfigError("seasonal periods must be positive");
    cfg.periods.push_back(p);
  }
  if (opt.trend_window < 0) throw ConfigError("--trend-window must be >= 0");
  cfg.trend_window = opt.trend_window;
  cfg.max_missing_fraction = opt.max_missing;
  cfg.check_unit_interval = !opt.no_unit_check;

  const Table in = read_csv_table(fs::path(opt.in));
  if (in.columns.size() < 2) throw ConfigError("input needs a time column and at least one value column");
  const PreprocessResult res =
      preprocess(in.data.col(0), in.data.rightCols(in.data.cols() - 1), cfg);
  print_warnings(res.warnings);
  Table out;
  out.columns = in.columns;
  out.data.resize(in.data.rows(), in.data.cols());
  out.data.col(0) = in.data.col(0);
  out.data.rightCols(in.data.cols() - 1) = res.residuals;
  write_csv_table(fs::path(opt.out), out);
  std::cout << "wrote " << opt.out << " (" << out.data.rows() << " rows, " << res.filled << " values filled)\n";
  return 0;
}

int cmd_zeta(const ZetaCmd& opt) {
  const Network net = load_network(opt.net);
  if (!(std::abs(opt.model.c) < 1.0)) throw ConfigError("--c must satisfy |c| < 1");
  if (!(opt.r_min >= 0.0 && opt.r_max > opt.r_min) || opt.points < 2) {
    throw ConfigError("need 0 <= r-min < r-max and at least two points");
  }
  const MixingMeasure pi = build_mixing(opt.model);
  const int d = net.size();
  const LevyMomentSpec levy{broadcast(opt.mu, d, "--mu"), opt.sigma2 * Eigen::MatrixXd::Identity(d, d)};
  levy.validate(d);
  const WeakDepParams wd = WeakDepParams::from_drift(drift_K(opt.model.c, net), opt.C);

  const double lo = std::log(std::max(opt.r_min, 1e-300));
  const double hi = std::log(opt.r_max);
  Table t;
  t.columns = {"r", "zeta"};
  t.data.resize(opt.points, 2);
  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 0; i < opt.points; ++i) {
    const double r = opt.r_min == 0.0 && i == 0 ? 0.0 : std::exp(lo + (hi - lo) * i / (opt.points - 1));
    const double z = zeta_bound(pi, opt.model.c, levy, net, wd, r);
    t.data.row(i) << r, z;
    if (r >= opt.fit_from && z > 0.0) {
      xs.push_back(std::log(r));
      ys.push_back(std::log(z));
    }
  }
  double slope = std::numeric_limits<double>::quiet_NaN();
  if (xs.size() >= 2) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  if (opt.out.empty()) {
    write_csv_table(std::cout, t);
  } else {
    write_csv_table(fs::path(opt.out), t);
    KeyValues meta;
    describe_mixing(meta, pi);
    meta.set("c", opt.model.c);
    meta.set("kappa_K", wd.kappa_K);
    meta.set("rho_K", wd.rho_K);
    meta.set("C", wd.C);
    meta.set("fit_from", opt.fit_from);
    meta.set("loglog_slope", slope);
    write_key_values(sidecar_for(opt.out), meta);
  }
  std::cout << "loglog_slope = " << format_double(slope) << '\n';
  return 0;
}

}  // namespace graphsupou::cli
