#include "graphsupou/empirical.hpp"

#include "graphsupou/errors.hpp"
#include "graphsupou/linops.hpp"

#include <limits>
#include <sstream>
#include <stdexcept>

namespace graphsupou {

EmpiricalMoments empirical_moments(const Eigen::MatrixXd& values, double delta, Eigen::Index h_max) {
  const Eigen::Index N = values.rows();
  if (N < 1) throw std::invalid_argument("empirical_moments: empty path");
  if (h_max < 0 || h_max >= N) throw std::invalid_argument("empirical_moments: h_max must lie in [0, N - 1]");
  if (!values.allFinite()) throw std::invalid_argument("empirical_moments: path has non-finite values");

  EmpiricalMoments em;
  em.N = N;
  em.delta = delta;
  em.mean = values.colwise().mean().transpose();
  const Eigen::MatrixXd Y = values.rowwise() - em.mean.transpose();
  em.autocov.reserve(h_max + 1);
  for (Eigen::Index h = 0; h <= h_max; ++h) {
    const Eigen::Index n = N - h;
    em.autocov.push_back(Y.topRows(n).transpose() * Y.bottomRows(n) / static_cast<double>(n));
  }
  em.var = 0.5 * (em.autocov[0] + em.autocov[0].transpose());
  em.autocov[0] = em.var;
  return em;
}

EmpiricalMoments empirical_moments(const SamplePath& path, Eigen::Index h_max) {
  return empirical_moments(path.values, path.delta, h_max);
}

Eigen::MatrixXd empirical_R(const EmpiricalMoments& em, Eigen::Index h) {
  if (h < 0 || h > em.h_max()) throw std::invalid_argument("empirical_R: lag outside the computed range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(em.var, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(cond < 1e12)) {
    std::ostringstream msg;
    msg << "empirical variance is singular or ill-conditioned (condition number " << cond << ")";
    throw NumericalError(msg.str());
  }
  // R = C var^{-1}  <=>  var R^T = C^T
  return em.var.ldlt().solve(em.autocov[h].transpose()).transpose();
}

std::vector<LagEigen> leading_eig_series(const EmpiricalMoments& em, Eigen::Index h_from, Eigen::Index h_to) {
  if (h_from < 0 || h_to > em.h_max() || h_from > h_to) {
    throw std::invalid_argument("leading_eig_series: lag range outside the computed moments");
  }
  std::vector<LagEigen> out;
  out.reserve(h_to - h_from + 1);
  for (Eigen::Index h = h_from; h <= h_to; ++h) out.push_back({h, leading_real_eigenvalue(empirical_R(em, h))});
  return out;
}

}  // namespace graphsupou
