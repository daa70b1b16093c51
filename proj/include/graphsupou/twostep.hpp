#pragma once

#include "graphsupou/empirical.hpp"
#include "graphsupou/mixing.hpp"
#include "graphsupou/model.hpp"
#include "graphsupou/network.hpp"
#include "graphsupou/optimize.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace graphsupou {

struct TwoStepConfig {
  Family family = Family::gamma;
  int atoms = 2;              // SumExp only
  Eigen::Index n_star = 40;   // lags h = 1..n_star enter the loss
  double alpha_max = 20.0;
  double rate_max = 50.0;
  OptimizerConfig optimizer;
};

struct LagFitPoint {
  Eigen::Index h = 0;
  double l_hat = 0.0;
  double rho = 0.0;
};

/// Minimiser of (1/N*) sum_h (l_hat(h Delta) - rho(h Delta; theta, c))^2.
struct CurveFit {
  MixingMeasure pi = MixingMeasure::gamma(2.0);
  double c = 0.0;
  double loss = 0.0;
  bool converged = false;
  int evaluations = 0;
  // Only the Gamma family separates theta from c through the eigenvalue
  // curve; Dirac and SumExp fits lie on a ridge in which lambda (1 + c a*)
  // is what the data determine.
  bool identifiable = true;
};

CurveFit fit_eigen_curve(const std::vector<LagEigen>& l_hat, double a_star, double delta,
                         const TwoStepConfig& cfg);

struct TwoStepFit {
  MixingMeasure pi = MixingMeasure::gamma(2.0);
  double c_hat = 0.0;
  double loss_value = 0.0;
  bool converged = false;
  bool identifiable = true;
  Eigen::Index n_star = 0;
  std::vector<LagFitPoint> lags;
  Eigen::VectorXd mu_L_hat;
  Eigen::MatrixXd sigma2_L_hat;

  // alpha (Gamma), lambda (Dirac), or (w_1..w_K, lambda_1..lambda_K) (SumExp)
  Eigen::VectorXd theta_hat() const;
  std::vector<std::string> theta_names() const;
};

// mu_L = -K(c) mean / inv_mean(pi), sigma2_L = -(K var + var K^T) / inv_mean(pi),
// the latter symmetrised.
LevyMomentSpec fit_levy_moments(const MixingMeasure& pi_hat, double c_hat, const EmpiricalMoments& em,
                                const Network& net);

TwoStepFit twostep_fit(const EmpiricalMoments& em, const Network& net, const TwoStepConfig& cfg);
// Computes the empirical moments up to lag cfg.n_star first.
TwoStepFit twostep_fit(const SamplePath& path, const Network& net, const TwoStepConfig& cfg);

}  // namespace graphsupou
