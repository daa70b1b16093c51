#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace graphsupou::cli {

struct NetOptions {
  std::string path;
  bool directed = false;
};

struct ModelOptions {
  std::string family = "gamma";
  double alpha = 1.5;
  double lambda = 1.0;
  std::vector<double> weights{0.5, 0.5};
  std::vector<double> rates{1.0, 2.0};
  double c = -0.8;
};

struct LevyOptions {
  double rate = 5.0;
  std::string jumps = "gauss-iid";  // gauss-iid | gauss | constant
  double jump_var = 1.0;
  std::vector<double> jump_mean;    // gauss: broadcast when of length 1
  std::vector<double> jump_value;   // constant: broadcast when of length 1
};

struct SimOptions {
  double delta = 1.0;
  long long n = 1000;
  std::uint64_t seed = 1;
  double burn_in = 0.0;
  double eps = 1e-8;
  double quantile = 1e-3;
  double max_burn_in = 1e5;
};

struct SimulateCmd {
  NetOptions net;
  ModelOptions model;
  LevyOptions levy;
  SimOptions sim;
  std::string out = "results/path.csv";
};

struct FitCmd {
  std::string path;
  NetOptions net;
  double delta = 0.0;  // 0: from the sidecar, else 1
  std::vector<std::string> families{"gamma"};
  long long n_star = 40;
  std::string sweep = "5:100:5";
  long long curve_max = 100;
  bool gmm = false;
  long long gmm_m = 2;
  int gmm_max_iter = 20000;
  std::string sigma = "diagonal";
  bool one_stage = false;
  std::string out = "results/fit";
};

struct McCmd {
  NetOptions net;
  ModelOptions model;
  LevyOptions levy;
  SimOptions sim;
  int reps = 100;
  int jobs = 1;
  std::string lags = "5:100:5";
  long long window = 35;
  std::string out = "results/mc";
};

struct PreprocessCmd {
  std::string in;
  std::string out = "results/preprocessed.csv";
  std::vector<long long> periods{24, 8760};
  long long trend_window = 729;
  double max_missing = 0.01;
  bool no_unit_check = false;
};

struct ZetaCmd {
  NetOptions net;
  ModelOptions model;
  std::vector<double> mu{1.0};
  double sigma2 = 1.0;
  double C = 1.0;
  double r_min = 1.0;
  double r_max = 1e5;
  int points = 61;
  double fit_from = 1e2;
  std::string out;
};

int cmd_network(const NetOptions& opt);
int cmd_simulate(const SimulateCmd& opt);
int cmd_fit(const FitCmd& opt);
int cmd_mc_study(const McCmd& opt);
int cmd_preprocess(const PreprocessCmd& opt);
int cmd_zeta(const ZetaCmd& opt);

// "a:b:s" (inclusive range with step) or a comma-separated list.
std::vector<long long> parse_lags(const std::string& spec);

}  // namespace graphsupou::cli
