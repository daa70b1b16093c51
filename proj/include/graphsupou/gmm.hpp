#pragma once

#include "graphsupou/empirical.hpp"
#include "graphsupou/network.hpp"
#include "graphsupou/optimize.hpp"
#include "graphsupou/params.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace graphsupou {

// Data part of the moment function at one window X_t..X_{t+m} (rows):
// (X_t, vech(X_t X_{t+i}^T), i = 0..m).
Eigen::VectorXd moment_statistic(const Eigen::MatrixXd& window);
// f = moment_statistic(window) - moment_vector(xi).stacked()
Eigen::VectorXd gmm_moment_f(const Eigen::MatrixXd& window, const MomentVector& model);
Eigen::VectorXd gmm_moment_f(const Eigen::MatrixXd& window, const ParamLayout& layout, const Eigen::VectorXd& xi,
                             const Network& net, double delta);

// Row t holds moment_statistic of rows t..t+m of `values`; N - m rows.
Eigen::MatrixXd moment_statistic_series(const Eigen::MatrixXd& values, Eigen::Index m);

// Bartlett-weighted sum of the sample autocovariances of the rows of
// `series` (demeaned), bandwidth floor(T^{1/3}) when `bandwidth` < 0.
// Symmetrised with negative eigenvalues set to 0.
Eigen::MatrixXd hac_longrun_cov(const Eigen::MatrixXd& series, Eigen::Index bandwidth = -1);

// Mean over the window's frames of d f / d xi by central differences with
// step 1e-5 (1 + |xi_j|). The data part of f has zero derivative, so the
// differences are taken on the model moments alone and the result does not
// depend on the window beyond its shape.
Eigen::MatrixXd moment_jacobian(const Eigen::MatrixXd& window, const ParamLayout& layout, const Eigen::VectorXd& xi,
                                const Network& net, double delta);
Eigen::MatrixXd moment_jacobian(const ParamLayout& layout, const Eigen::VectorXd& xi, const Network& net,
                                Eigen::Index m, double delta);

struct AsymptoticCov {
  Eigen::MatrixXd M;    // (F^T V F)^{-1} F^T V
  Eigen::MatrixXd cov;  // M F_sigma M^T / N
  Eigen::VectorXd std_errors;
};

// Throws NumericalError when F lacks full column rank.
AsymptoticCov asymptotic_cov(const Eigen::MatrixXd& F, const Eigen::MatrixXd& V, const Eigen::MatrixXd& F_sigma,
                             Eigen::Index N);

struct GmmConfig {
  Family family = Family::dirac;
  int atoms = 2;
  SigmaStructure sigma = SigmaStructure::diagonal;
  Eigen::Index m = 2;
  bool two_stage = true;
  Eigen::Index bandwidth = -1;
  double alpha_max = 20.0;
  double rate_max = 50.0;
  std::optional<Eigen::VectorXd> warm_start;  // full parameter vector
  OptimizerConfig optimizer;
};

struct GmmFit {
  ParamLayout layout;
  Eigen::VectorXd xi_hat;
  Eigen::VectorXd xi_stage1;
  double objective_value = 0.0;
  double objective_stage1 = 0.0;
  Eigen::MatrixXd V_N;
  Eigen::MatrixXd F_sigma_hat;
  Eigen::MatrixXd jacobian;
  Eigen::MatrixXd asymptotic_cov;
  Eigen::VectorXd std_errors;
  bool converged = false;
  bool rank_deficient = false;
  std::vector<std::string> weak_directions;  // parameters loading on null directions of F
  Eigen::Index N = 0;

  ModelParams params() const { return unpack(layout, xi_hat); }
};

GmmFit gmm_fit(const SamplePath& path, const Network& net, const GmmConfig& cfg);

// Objective f_N(xi)^T V f_N(xi) for a precomputed mean statistic.
double gmm_objective(const Eigen::VectorXd& mean_statistic, const Eigen::MatrixXd& V, const ParamLayout& layout,
                     const Eigen::VectorXd& xi, const Network& net, Eigen::Index m, double delta);

}  // namespace graphsupou
