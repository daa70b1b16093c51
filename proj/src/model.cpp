#include "graphsupou/model.hpp"

#include "graphsupou/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace graphsupou {

namespace {

// Above this eigenvector condition number the Kronecker route is used for
// Lyapunov solves instead of the eigenbasis.
constexpr double kEigenbasisLyapunovLimit = 1e8;

}  // namespace

double inv_mean(const MixingMeasure& pi) {
  const double v = pi.inverse_moment();
  if (!std::isfinite(v)) throw std::invalid_argument("inverse moment of the mixing measure diverges");
  return v;
}

WellDefinedReport well_defined_check(const MixingMeasure& pi, double c) {
  WellDefinedReport report;
  if (!(std::abs(c) < 1.0)) {
    report.diagnostic = "|c| must be < 1 for K(c) to be stable";
    return report;
  }
  report.inverse_moment = pi.inverse_moment();
  report.pass = std::isfinite(report.inverse_moment);
  std::ostringstream msg;
  msg << pi.describe() << ": integral of 1/theta2 = " << report.inverse_moment;
  if (!report.pass) msg << " (diverges; Gamma shape must exceed 1)";
  report.diagnostic = msg.str();
  return report;
}

LevyMomentSpec LevyMomentSpec::zero(int d) {
  return {Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, d)};
}

void LevyMomentSpec::validate(int d) const {
  if (mu_L.size() != d || sigma2_L.rows() != d || sigma2_L.cols() != d) {
    throw std::invalid_argument("Levy moments do not match the network dimension");
  }
  if (!mu_L.allFinite() || !sigma2_L.allFinite()) throw std::invalid_argument("Levy moments must be finite");
  const double scale = std::max(1.0, sigma2_L.cwiseAbs().maxCoeff());
  if ((sigma2_L - sigma2_L.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("sigma2_L must be symmetric");
  }
  if (d > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sigma2_L + sigma2_L.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
      throw std::invalid_argument("sigma2_L must be positive semidefinite");
    }
  }
}

WeakDepParams WeakDepParams::from_drift(const Eigen::MatrixXd& K, double C) {
  const Diagonalization eig(K);
  WeakDepParams wd;
  wd.kappa_K = eig.condition();
  wd.rho_K = -eig.values().real().maxCoeff();
  wd.C = C;
  if (!(wd.rho_K > 0.0)) throw NumericalError("K(c) is not stable");
  return wd;
}

GraphSupOU::GraphSupOU(const Network& net, MixingMeasure pi, double c)
    : pi_(std::move(pi)), c_(c), a_star_(net.a_star()), k_(drift_K(c, net)) {
  inv_mean_ = inv_mean(pi_);
  eig_ = std::make_shared<const Diagonalization>(k_);
  if (eig_->defective() || eig_->condition() > kEigenbasisLyapunovLimit) {
    lyap_ = std::make_shared<const LyapunovOperator>(k_);
  }
}

Eigen::MatrixXd GraphSupOU::lyapunov_solution(const Eigen::MatrixXd& sigma2_L) const {
  Eigen::MatrixXd P = lyap_ ? lyap_->solve(-sigma2_L) : eig_->solve_lyapunov(-sigma2_L);
  return 0.5 * (P + P.transpose());
}

Eigen::MatrixXd GraphSupOU::mixture_kernel(double s) const {
  const int d = dim();
  if (s == 0.0) return inv_mean_ * Eigen::MatrixXd::Identity(d, d);
  if (const auto* g = std::get_if<GammaLaw>(&pi_.law())) {
    const Eigen::MatrixXd base = Eigen::MatrixXd::Identity(d, d) - k_ * s;
    return matrix_power_real(base, 1.0 - g->alpha) / (g->alpha - 1.0);
  }
  if (!eig_->defective()) {
    return eig_->apply_function([this, s](std::complex<double> k) { return pi_.inverse_laplace(-k * s); });
  }
  // Defective K(c): atom-by-atom matrix exponentials.
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  if (const auto* dirac = std::get_if<DiracLaw>(&pi_.law())) {
    return mat_exp(dirac->rate * s * k_) / dirac->rate;
  }
  const auto& law = std::get<SumExpLaw>(pi_.law());
  for (std::size_t i = 0; i < law.atoms.size(); ++i) {
    const double r = law.atoms[i].rate;
    out += pi_.atom_probabilities()[i] / r * mat_exp(r * s * k_);
  }
  return out;
}

Eigen::VectorXd GraphSupOU::mean(const LevyMomentSpec& levy) const {
  levy.validate(dim());
  return -inv_mean_ * k_.partialPivLu().solve(levy.mu_L);
}

Eigen::MatrixXd GraphSupOU::variance(const LevyMomentSpec& levy) const {
  levy.validate(dim());
  return inv_mean_ * lyapunov_solution(levy.sigma2_L);
}

Eigen::MatrixXd GraphSupOU::autocov(const LevyMomentSpec& levy, double h, double delta) const {
  if (!(h >= 0.0)) throw std::invalid_argument("autocovariance lag must be >= 0");
  if (h == 0.0) return variance(levy);
  levy.validate(dim());
  return mixture_kernel(h * delta) * lyapunov_solution(levy.sigma2_L);
}

Eigen::MatrixXd GraphSupOU::scaled_R(double h, double delta) const {
  if (!(h >= 0.0)) throw std::invalid_argument("lag must be >= 0");
  if (h == 0.0) return Eigen::MatrixXd::Identity(dim(), dim());
  return mixture_kernel(h * delta) / inv_mean_;
}

double GraphSupOU::rho(double h, double delta) const { return rho_eigen(pi_, c_, a_star_, h, delta); }

WeakDepParams GraphSupOU::weak_dependence(double C) const {
  WeakDepParams wd;
  wd.kappa_K = eig_->condition();
  wd.rho_K = -eig_->values().real().maxCoeff();
  wd.C = C;
  return wd;
}

Eigen::VectorXd analytic_mean(const MixingMeasure& pi, double c, const LevyMomentSpec& levy, const Network& net) {
  return GraphSupOU(net, pi, c).mean(levy);
}

Eigen::MatrixXd analytic_var(const MixingMeasure& pi, double c, const LevyMomentSpec& levy, const Network& net) {
  return GraphSupOU(net, pi, c).variance(levy);
}

Eigen::MatrixXd analytic_autocov(const MixingMeasure& pi, double c, const LevyMomentSpec& levy, const Network& net,
                                 double h, double delta) {
  return GraphSupOU(net, pi, c).autocov(levy, h, delta);
}

Eigen::MatrixXd scaled_R(const MixingMeasure& pi, double c, const Network& net, double h, double delta) {
  return GraphSupOU(net, pi, c).scaled_R(h, delta);
}

double rho_eigen(const MixingMeasure& pi, double c, double a_star, double h, double delta) {
  const double rate = 1.0 + c * a_star;
  if (!(rate > 0.0)) throw std::invalid_argument("rho_eigen: 1 + c a* must be positive");
  if (!(h >= 0.0)) throw std::invalid_argument("rho_eigen: lag must be >= 0");
  if (h == 0.0) return 1.0;
  const double s = rate * h * delta;
  if (const auto* g = std::get_if<GammaLaw>(&pi.law())) {
    if (!(g->alpha > 1.0)) throw std::invalid_argument("rho_eigen: Gamma shape must exceed 1");
    return std::pow(1.0 + s, 1.0 - g->alpha);
  }
  return pi.inverse_laplace(s).real() / inv_mean(pi);
}

double zeta_bound(const MixingMeasure& pi, double c, const LevyMomentSpec& levy, const Network& net,
                  const WeakDepParams& wd, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("zeta_bound: r must be >= 0");
  if (!(std::abs(c) < 1.0)) throw std::invalid_argument("zeta_bound: |c| must be < 1");
  levy.validate(net.size());
  const double sigma_norm = levy.sigma2_L.size() ? levy.sigma2_L.jacobiSvd().singularValues()(0) : 0.0;
  const double mu_norm = levy.mu_L.norm();
  const double kappa = wd.kappa_K;
  const double rho = wd.rho_K;
  const double jump_term = wd.C * sigma_norm * kappa * kappa / (2.0 * rho) * pi.theta_laplace(2.0 * rho * r);
  const double mean_term = mu_norm * kappa / rho * pi.laplace(rho * r);
  return std::sqrt(jump_term + mean_term);
}

}  // namespace graphsupou
