#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <memory>

namespace graphsupou {

// e^M by scaling and squaring with a Pade approximant.
Eigen::MatrixXd mat_exp(const Eigen::MatrixXd& M);

// The Lyapunov map X -> Q X + X Q^T.
Eigen::MatrixXd apply_lyapunov(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& X);

// Solves Q P + P Q^T = Y through the Kronecker system
// (I (x) Q + Q (x) I) vec(P) = vec(Y). Throws NumericalError when Q is not
// stable or the system's condition number exceeds 1e12.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& Y);

/// Lyapunov operator of a fixed drift matrix. The Kronecker matrix is built
/// eagerly; its LU factorisation happens on the first solve and is shared
/// between copies. Safe to use from several threads.
class LyapunovOperator {
 public:
  explicit LyapunovOperator(Eigen::MatrixXd Q);

  const Eigen::MatrixXd& drift() const { return q_; }
  const Eigen::MatrixXd& kron() const { return kron_; }
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& Y) const;
  // 1-norm condition estimate of the Kronecker matrix (factorises if needed).
  double condition() const;

 private:
  struct Factorisation;
  Eigen::MatrixXd q_;
  Eigen::MatrixXd kron_;
  std::shared_ptr<Factorisation> lu_;
};

Eigen::VectorXd vec(const Eigen::MatrixXd& X);
Eigen::MatrixXd unvec(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols);
// Lower triangle (i >= j) read column by column; d(d+1)/2 entries.
Eigen::VectorXd vech(const Eigen::MatrixXd& X);
// Inverse of vech for symmetric matrices.
Eigen::MatrixXd unvech(const Eigen::VectorXd& v, Eigen::Index d);
Eigen::Index vech_size(Eigen::Index d);

/// Eigendecomposition M = U diag(k) U^{-1} of a diagonalisable real matrix.
class Diagonalization {
 public:
  explicit Diagonalization(const Eigen::MatrixXd& M);

  const Eigen::VectorXcd& values() const { return values_; }
  const Eigen::MatrixXcd& vectors() const { return vectors_; }
  const Eigen::MatrixXcd& inverse_vectors() const { return inverse_; }
  // cond_2(U) = ||U|| ||U^{-1}||
  double condition() const { return condition_; }
  // Spectrum and eigenvectors are exactly real.
  bool is_real() const { return real_; }
  // Eigenvector condition number above 1e10.
  bool defective() const { return condition_ > 1e10; }

  // Re[U diag(f(k_j)) U^{-1}]
  Eigen::MatrixXd apply_function(const std::function<std::complex<double>(std::complex<double>)>& f) const;
  // e^{t M}
  Eigen::MatrixXd exp(double t) const;
  // Solves M P + P M^T = Y in the eigenbasis.
  Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& Y) const;

 private:
  Eigen::VectorXcd values_;
  Eigen::MatrixXcd vectors_;
  Eigen::MatrixXcd inverse_;
  double condition_ = 1.0;
  bool real_ = false;
};

// Principal real power M^p via the eigendecomposition. Throws
// std::invalid_argument when an eigenvalue lies on the closed negative real axis
// and NumericalError when cond(U) > 1e10.
Eigen::MatrixXd matrix_power_real(const Eigen::MatrixXd& M, double p);

// Largest real eigenvalue; eigenvalues with |Im| <= 1e-9 * spectral radius
// count as real. Falls back to the largest real part when none is real.
double leading_real_eigenvalue(const Eigen::MatrixXd& M);

// max Re sigma(M)
double spectral_abscissa(const Eigen::MatrixXd& M);

}  // namespace graphsupou
