#pragma once

#include "graphsupou/simulate.hpp"

#include <Eigen/Dense>

#include <vector>

namespace graphsupou {

/// Sample moments of a path: mean, variance (1/N) and lag-h
/// autocovariances (1/(N - h)) of (X_t - mean)(X_{t+h} - mean)^T.
struct EmpiricalMoments {
  Eigen::Index N = 0;
  double delta = 1.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd var;
  std::vector<Eigen::MatrixXd> autocov;  // index h = 0..h_max; autocov[0] == var

  Eigen::Index h_max() const { return static_cast<Eigen::Index>(autocov.size()) - 1; }
  Eigen::Index d() const { return mean.size(); }
};

// Throws std::invalid_argument when h_max >= N.
EmpiricalMoments empirical_moments(const Eigen::MatrixXd& values, double delta, Eigen::Index h_max);
EmpiricalMoments empirical_moments(const SamplePath& path, Eigen::Index h_max);

// autocov(h) var^{-1}; NumericalError when cond(var) >= 1e12.
Eigen::MatrixXd empirical_R(const EmpiricalMoments& em, Eigen::Index h);

struct LagEigen {
  Eigen::Index h = 0;
  double l_hat = 0.0;
};

// Leading real eigenvalue of empirical_R for h = h_from..h_to.
std::vector<LagEigen> leading_eig_series(const EmpiricalMoments& em, Eigen::Index h_from, Eigen::Index h_to);

}  // namespace graphsupou
