#include "graphsupou/linops.hpp"

#include "graphsupou/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace graphsupou {

namespace {

constexpr double kLyapunovConditionLimit = 1e12;
constexpr double kEigenbasisConditionLimit = 1e10;
constexpr double kRealEigenTolerance = 1e-9;

void require_square(const Eigen::MatrixXd& M, const char* what) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
  }
}

double cond2(const Eigen::MatrixXcd& U) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(U);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

Eigen::MatrixXd mat_exp(const Eigen::MatrixXd& M) {
  require_square(M, "mat_exp");
  if (!M.allFinite()) throw std::invalid_argument("mat_exp: non-finite entries");
  return M.exp();
}

Eigen::MatrixXd apply_lyapunov(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& X) {
  require_square(Q, "apply_lyapunov");
  if (X.rows() != Q.rows() || X.cols() != Q.rows()) {
    throw std::invalid_argument("apply_lyapunov: shape mismatch");
  }
  return Q * X + X * Q.transpose();
}

struct LyapunovOperator::Factorisation {
  std::once_flag once;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double condition = 0.0;
  double abscissa = 0.0;
};

LyapunovOperator::LyapunovOperator(Eigen::MatrixXd Q) : q_(std::move(Q)), lu_(std::make_shared<Factorisation>()) {
  require_square(q_, "LyapunovOperator");
  const Eigen::Index d = q_.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  kron_.resize(d * d, d * d);
  // vec(Q X + X Q^T) = (I (x) Q + Q (x) I) vec(X) for column-stacked vec;
  // block (j, l) = delta_jl Q + Q(j, l) I
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index l = 0; l < d; ++l) {
      auto block = kron_.block(j * d, l * d, d, d);
      block = q_(j, l) * I;
      if (j == l) block += q_;
    }
  }
}

Eigen::MatrixXd LyapunovOperator::apply(const Eigen::MatrixXd& X) const {
  return apply_lyapunov(q_, X);
}

double LyapunovOperator::condition() const {
  std::call_once(lu_->once, [this] {
    lu_->abscissa = q_.size() ? spectral_abscissa(q_) : -1.0;
    lu_->lu.compute(kron_);
    const double rc = kron_.size() ? lu_->lu.rcond() : 1.0;
    lu_->condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  });
  return lu_->condition;
}

Eigen::MatrixXd LyapunovOperator::solve(const Eigen::MatrixXd& Y) const {
  const Eigen::Index d = q_.rows();
  if (Y.rows() != d || Y.cols() != d) throw std::invalid_argument("Lyapunov solve: shape mismatch");
  const double cond = condition();
  if (!(lu_->abscissa < 0.0)) {
    std::ostringstream msg;
    msg << "Lyapunov solve: drift is not stable (max real eigenvalue " << lu_->abscissa << ")";
    throw NumericalError(msg.str());
  }
  if (!(cond <= kLyapunovConditionLimit)) {
    std::ostringstream msg;
    msg << "Lyapunov solve: Kronecker system condition number " << cond << " exceeds 1e12";
    throw NumericalError(msg.str());
  }
  const Eigen::VectorXd p = lu_->lu.solve(vec(Y));
  return unvec(p, d, d);
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& Y) {
  return LyapunovOperator(Q).solve(Y);
}

Eigen::VectorXd vec(const Eigen::MatrixXd& X) {
  return Eigen::Map<const Eigen::VectorXd>(X.data(), X.size());
}

Eigen::MatrixXd unvec(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
  if (rows < 0 || cols < 0 || v.size() != rows * cols) throw std::invalid_argument("unvec: shape mismatch");
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

Eigen::Index vech_size(Eigen::Index d) { return d * (d + 1) / 2; }

Eigen::VectorXd vech(const Eigen::MatrixXd& X) {
  if (X.rows() != X.cols()) throw std::invalid_argument("vech: matrix must be square");
  const Eigen::Index d = X.rows();
  Eigen::VectorXd v(vech_size(d));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = j; i < d; ++i) v(k++) = X(i, j);
  }
  return v;
}

Eigen::MatrixXd unvech(const Eigen::VectorXd& v, Eigen::Index d) {
  if (d < 0 || v.size() != vech_size(d)) throw std::invalid_argument("unvech: shape mismatch");
  Eigen::MatrixXd X(d, d);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = j; i < d; ++i) {
      X(i, j) = v(k);
      X(j, i) = v(k);
      ++k;
    }
  }
  return X;
}

Diagonalization::Diagonalization(const Eigen::MatrixXd& M) {
  require_square(M, "Diagonalization");
  if (!M.allFinite()) throw std::invalid_argument("Diagonalization: non-finite entries");
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, true);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition did not converge");
  values_ = es.eigenvalues();
  real_ = (values_.imag().array() == 0.0).all();
  vectors_ = es.eigenvectors();
  if (real_) vectors_ = vectors_.real().cast<std::complex<double>>();
  condition_ = cond2(vectors_);
  if (std::isfinite(condition_)) {
    inverse_ = vectors_.inverse();
  } else {
    inverse_ = Eigen::MatrixXcd::Zero(M.rows(), M.cols());
  }
}

Eigen::MatrixXd Diagonalization::apply_function(
    const std::function<std::complex<double>(std::complex<double>)>& f) const {
  Eigen::VectorXcd fk(values_.size());
  for (Eigen::Index j = 0; j < values_.size(); ++j) fk(j) = f(values_(j));
  return (vectors_ * fk.asDiagonal() * inverse_).real();
}

Eigen::MatrixXd Diagonalization::exp(double t) const {
  return apply_function([t](std::complex<double> k) { return std::exp(t * k); });
}

Eigen::MatrixXd Diagonalization::solve_lyapunov(const Eigen::MatrixXd& Y) const {
  const Eigen::Index d = values_.size();
  if (Y.rows() != d || Y.cols() != d) throw std::invalid_argument("Lyapunov solve: shape mismatch");
  // M = U K U^{-1}  =>  P = U Z U^T with Z_ij = (U^{-1} Y U^{-T})_ij / (k_i + k_j)
  Eigen::MatrixXcd Z = inverse_ * Y.cast<std::complex<double>>() * inverse_.transpose();
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const std::complex<double> denom = values_(i) + values_(j);
      if (std::abs(denom) == 0.0) throw NumericalError("Lyapunov solve: singular operator");
      Z(i, j) /= denom;
    }
  }
  return (vectors_ * Z * vectors_.transpose()).real();
}

Eigen::MatrixXd matrix_power_real(const Eigen::MatrixXd& M, double p) {
  require_square(M, "matrix_power_real");
  const Diagonalization eig(M);
  const double radius = eig.values().size() ? eig.values().cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index j = 0; j < eig.values().size(); ++j) {
    const auto k = eig.values()(j);
    if (std::abs(k.imag()) <= kRealEigenTolerance * radius && k.real() <= 0.0) {
      throw std::invalid_argument("matrix_power_real: eigenvalue on the closed negative real axis");
    }
  }
  if (eig.condition() > kEigenbasisConditionLimit) {
    std::ostringstream msg;
    msg << "matrix_power_real: eigenvector matrix is ill-conditioned (cond " << eig.condition() << ")";
    throw NumericalError(msg.str());
  }
  return eig.apply_function([p](std::complex<double> k) { return std::pow(k, p); });
}

double leading_real_eigenvalue(const Eigen::MatrixXd& M) {
  require_square(M, "leading_real_eigenvalue");
  if (M.size() == 0) throw std::invalid_argument("leading_real_eigenvalue: empty matrix");
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  const Eigen::VectorXcd& ev = es.eigenvalues();
  const double radius = ev.cwiseAbs().maxCoeff();
  const double tol = kRealEigenTolerance * radius;
  bool found = false;
  double best_real = -std::numeric_limits<double>::infinity();
  double best_any = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    best_any = std::max(best_any, ev(j).real());
    if (std::abs(ev(j).imag()) <= tol) {
      found = true;
      best_real = std::max(best_real, ev(j).real());
    }
  }
  return found ? best_real : best_any;
}

double spectral_abscissa(const Eigen::MatrixXd& M) {
  require_square(M, "spectral_abscissa");
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  return es.eigenvalues().real().maxCoeff();
}

}  // namespace graphsupou
