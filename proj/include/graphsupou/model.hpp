#pragma once

#include "graphsupou/linops.hpp"
#include "graphsupou/mixing.hpp"
#include "graphsupou/network.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>

namespace graphsupou {

// Integral of 1/theta2 under pi. Throws std::invalid_argument for Gamma alpha <= 1.
double inv_mean(const MixingMeasure& pi);

struct WellDefinedReport {
  bool pass = false;
  double inverse_moment = 0.0;
  std::string diagnostic;
};

// For Q = theta2 K(c) the integrability condition on kappa^2/rho reduces to a
// finite inverse moment of pi.
WellDefinedReport well_defined_check(const MixingMeasure& pi, double c);

/// First two moments of the Levy seed.
struct LevyMomentSpec {
  Eigen::VectorXd mu_L;
  Eigen::MatrixXd sigma2_L;

  static LevyMomentSpec zero(int d);
  // Symmetric within 1e-12, eigenvalues >= -1e-10, conforming to d.
  void validate(int d) const;
};

struct WeakDepParams {
  double kappa_K = 1.0;  // cond_2 of the eigenvector matrix of K(c)
  double rho_K = 1.0;    // -max Re sigma(K(c))
  double C = 1.0;        // norm-equivalence constant

  static WeakDepParams from_drift(const Eigen::MatrixXd& K, double C = 1.0);
};

/// Second-order structure of a graph supOU process for fixed (network, pi, c).
/// Caches K(c) and its eigendecomposition; immutable after construction.
class GraphSupOU {
 public:
  GraphSupOU(const Network& net, MixingMeasure pi, double c);

  int dim() const { return static_cast<int>(k_.rows()); }
  double c() const { return c_; }
  double a_star() const { return a_star_; }
  const MixingMeasure& mixing() const { return pi_; }
  const Eigen::MatrixXd& K() const { return k_; }
  const Diagonalization& eigen() const { return *eig_; }
  double inverse_moment() const { return inv_mean_; }

  // P with K P + P K^T = -sigma2_L.
  Eigen::MatrixXd lyapunov_solution(const Eigen::MatrixXd& sigma2_L) const;
  // Integral of (1/theta2) e^{theta2 K s} pi(d theta2).
  Eigen::MatrixXd mixture_kernel(double s) const;

  Eigen::VectorXd mean(const LevyMomentSpec& levy) const;
  Eigen::MatrixXd variance(const LevyMomentSpec& levy) const;
  // cov(X_{h Delta}, X_0)
  Eigen::MatrixXd autocov(const LevyMomentSpec& levy, double h, double delta) const;
  Eigen::MatrixXd scaled_R(double h, double delta) const;
  double rho(double h, double delta) const;
  WeakDepParams weak_dependence(double C = 1.0) const;

 private:
  MixingMeasure pi_;
  double c_ = 0.0;
  double a_star_ = 1.0;
  double inv_mean_ = 0.0;
  Eigen::MatrixXd k_;
  std::shared_ptr<const Diagonalization> eig_;
  std::shared_ptr<const LyapunovOperator> lyap_;
};

Eigen::VectorXd analytic_mean(const MixingMeasure& pi, double c, const LevyMomentSpec& levy, const Network& net);
Eigen::MatrixXd analytic_var(const MixingMeasure& pi, double c, const LevyMomentSpec& levy, const Network& net);
Eigen::MatrixXd analytic_autocov(const MixingMeasure& pi, double c, const LevyMomentSpec& levy, const Network& net,
                                 double h, double delta);
Eigen::MatrixXd scaled_R(const MixingMeasure& pi, double c, const Network& net, double h, double delta);

// Leading eigenvalue of the scaled autocovariance in closed form,
// [int (1/theta2) e^{-theta2 (1 + c a*) h Delta} d pi] / [int (1/theta2) d pi].
double rho_eigen(const MixingMeasure& pi, double c, double a_star, double h, double delta);

// Upper bound on the zeta-weak-dependence coefficients at distance r.
double zeta_bound(const MixingMeasure& pi, double c, const LevyMomentSpec& levy, const Network& net,
                  const WeakDepParams& wd, double r);

}  // namespace graphsupou
