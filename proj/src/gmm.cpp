#include "graphsupou/gmm.hpp"

#include "graphsupou/errors.hpp"
#include "graphsupou/linops.hpp"
#include "graphsupou/twostep.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace graphsupou {

Eigen::VectorXd moment_statistic(const Eigen::MatrixXd& window) {
  const Eigen::Index d = window.cols();
  const Eigen::Index m = window.rows() - 1;
  if (m < 0) throw std::invalid_argument("moment window needs at least one frame");
  Eigen::VectorXd s(moment_count(d, m));
  const Eigen::VectorXd x0 = window.row(0).transpose();
  s.head(d) = x0;
  Eigen::Index offset = d;
  for (Eigen::Index i = 0; i <= m; ++i) {
    const Eigen::VectorXd xi = window.row(i).transpose();
    for (Eigen::Index col = 0; col < d; ++col) {
      for (Eigen::Index row = col; row < d; ++row) s(offset++) = x0(row) * xi(col);
    }
  }
  return s;
}

Eigen::VectorXd gmm_moment_f(const Eigen::MatrixXd& window, const MomentVector& model) {
  if (window.cols() != model.mean.size() || window.rows() != static_cast<Eigen::Index>(model.D.size())) {
    throw std::invalid_argument("moment window does not match the model moments");
  }
  return moment_statistic(window) - model.stacked();
}

Eigen::VectorXd gmm_moment_f(const Eigen::MatrixXd& window, const ParamLayout& layout, const Eigen::VectorXd& xi,
                             const Network& net, double delta) {
  if (window.cols() != layout.d) throw std::invalid_argument("moment window dimension mismatch");
  return gmm_moment_f(window, moment_vector(layout, xi, net, window.rows() - 1, delta));
}

Eigen::MatrixXd moment_statistic_series(const Eigen::MatrixXd& values, Eigen::Index m) {
  const Eigen::Index N = values.rows();
  if (m < 0 || N <= m) throw std::invalid_argument("path too short for the requested moment lags");
  Eigen::MatrixXd out(N - m, moment_count(values.cols(), m));
  for (Eigen::Index t = 0; t + m < N; ++t) out.row(t) = moment_statistic(values.middleRows(t, m + 1)).transpose();
  return out;
}

Eigen::MatrixXd hac_longrun_cov(const Eigen::MatrixXd& series, Eigen::Index bandwidth) {
  const Eigen::Index T = series.rows();
  if (T < 2) throw std::invalid_argument("hac_longrun_cov: need at least two observations");
  const Eigen::Index b =
      bandwidth >= 0 ? bandwidth : static_cast<Eigen::Index>(std::floor(std::cbrt(static_cast<double>(T))));
  if (T < 2 * b) throw std::invalid_argument("hac_longrun_cov: fewer than 2 * bandwidth observations");
  const Eigen::MatrixXd Y = series.rowwise() - series.colwise().mean();
  const double inv_T = 1.0 / static_cast<double>(T);
  Eigen::MatrixXd F = Y.transpose() * Y * inv_T;
  for (Eigen::Index l = 1; l <= b; ++l) {
    const double w = 1.0 - static_cast<double>(l) / static_cast<double>(b + 1);
    const Eigen::MatrixXd G = Y.topRows(T - l).transpose() * Y.bottomRows(T - l) * inv_T;
    F += w * (G + G.transpose());
  }
  F = (0.5 * (F + F.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F);
  const Eigen::MatrixXd floored =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (floored + floored.transpose());
}

Eigen::MatrixXd moment_jacobian(const ParamLayout& layout, const Eigen::VectorXd& xi, const Network& net,
                                Eigen::Index m, double delta) {
  const Eigen::Index p = layout.dim();
  if (xi.size() != p) throw std::invalid_argument("moment_jacobian: parameter vector has the wrong length");
  const Eigen::Index q = moment_count(layout.d, m);
  Eigen::MatrixXd F(q, p);
  auto g = [&](const Eigen::VectorXd& x) { return moment_vector(layout, x, net, m, delta).stacked(); };
  for (Eigen::Index j = 0; j < p; ++j) {
    const double h = 1e-5 * (1.0 + std::abs(xi(j)));
    Eigen::VectorXd fwd = xi;
    Eigen::VectorXd bwd = xi;
    fwd(j) += h;
    bwd(j) -= h;
    const bool up = admissible(layout, fwd);
    const bool down = admissible(layout, bwd);
    // f = statistic - g, so df/dxi = -dg/dxi
    if (up && down) {
      F.col(j) = -(g(fwd) - g(bwd)) / (2.0 * h);
    } else if (up) {
      F.col(j) = -(g(fwd) - g(xi)) / h;
    } else if (down) {
      F.col(j) = -(g(xi) - g(bwd)) / h;
    } else {
      throw std::invalid_argument("moment_jacobian: no admissible difference step");
    }
  }
  return F;
}

Eigen::MatrixXd moment_jacobian(const Eigen::MatrixXd& window, const ParamLayout& layout, const Eigen::VectorXd& xi,
                                const Network& net, double delta) {
  if (window.cols() != layout.d || window.rows() < 1) throw std::invalid_argument("moment window dimension mismatch");
  return moment_jacobian(layout, xi, net, window.rows() - 1, delta);
}

AsymptoticCov asymptotic_cov(const Eigen::MatrixXd& F, const Eigen::MatrixXd& V, const Eigen::MatrixXd& F_sigma,
                             Eigen::Index N) {
  if (V.rows() != F.rows() || V.cols() != F.rows() || F_sigma.rows() != F.rows() || F_sigma.cols() != F.rows()) {
    throw std::invalid_argument("asymptotic_cov: shape mismatch");
  }
  if (N < 1) throw std::invalid_argument("asymptotic_cov: N must be positive");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(F);
  const auto& sv = svd.singularValues();
  if (F.cols() > F.rows() || sv.size() == 0 || !(sv(sv.size() - 1) > 1e-10 * sv(0))) {
    throw NumericalError("moment Jacobian is rank deficient");
  }
  AsymptoticCov out;
  const Eigen::MatrixXd FtV = F.transpose() * V;
  out.M = (FtV * F).fullPivLu().solve(FtV);
  out.cov = out.M * F_sigma * out.M.transpose() / static_cast<double>(N);
  out.cov = (0.5 * (out.cov + out.cov.transpose())).eval();
  out.std_errors = out.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

double gmm_objective(const Eigen::VectorXd& mean_statistic, const Eigen::MatrixXd& V, const ParamLayout& layout,
                     const Eigen::VectorXd& xi, const Network& net, Eigen::Index m, double delta) {
  const Eigen::VectorXd fN = mean_statistic - moment_vector(layout, xi, net, m, delta).stacked();
  return fN.dot(V * fN);
}

namespace {

Transform full_transform(const ParamLayout& layout, const GmmConfig& cfg, const EmpiricalMoments& em) {
  std::vector<Bound> bounds;
  std::vector<SimplexBlock> simplices;
  switch (layout.family) {
    case Family::gamma:
      bounds.push_back(Bound::interval(1.0, cfg.alpha_max));
      break;
    case Family::dirac:
      bounds.push_back(Bound::interval(0.0, cfg.rate_max, 1e-2, std::min(10.0, cfg.rate_max)));
      break;
    case Family::sum_exp:
      for (int i = 0; i + 1 < layout.atoms; ++i) bounds.push_back(Bound::free(0.0, 1.0));
      for (int i = 0; i < layout.atoms; ++i) {
        bounds.push_back(Bound::interval(0.0, cfg.rate_max, 1e-2, std::min(10.0, cfg.rate_max)));
      }
      simplices.push_back({0, layout.atoms - 1});
      break;
  }
  bounds.push_back(Bound::interval(-1.0, 1.0));
  const double scale = std::max(1.0, em.mean.cwiseAbs().maxCoeff());
  for (int i = 0; i < layout.d; ++i) bounds.push_back(Bound::free(-scale, scale));
  const double vscale = std::max(1.0, em.var.diagonal().maxCoeff());
  switch (layout.sigma) {
    case SigmaStructure::scalar:
      bounds.push_back(Bound::lower(0.0, 0.0, vscale));
      break;
    case SigmaStructure::diagonal:
      for (int i = 0; i < layout.d; ++i) bounds.push_back(Bound::lower(0.0, 0.0, vscale));
      break;
    case SigmaStructure::full:
      for (int col = 0; col < layout.d; ++col) {
        for (int row = col; row < layout.d; ++row) {
          bounds.push_back(row == col ? Bound::lower(0.0, 0.0, vscale) : Bound::free(-vscale, vscale));
        }
      }
      break;
  }
  return Transform(std::move(bounds), std::move(simplices));
}

// Pseudo-inverse of a symmetric positive semidefinite matrix.
Eigen::MatrixXd psd_pinv(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const double top = std::max(0.0, es.eigenvalues().maxCoeff());
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(A.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double v = es.eigenvalues()(i);
    if (v > 1e-12 * top) inv(i) = 1.0 / v;
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

MixingMeasure mixing_from(const ParamLayout& layout, const Eigen::VectorXd& theta) {
  ParamLayout probe = layout;
  probe.sigma = SigmaStructure::scalar;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(probe.dim());
  x.head(layout.family_dim()) = theta;
  return unpack(probe, x).pi;
}

}  // namespace

GmmFit gmm_fit(const SamplePath& path, const Network& net, const GmmConfig& cfg) {
  if (cfg.m < 2) throw std::invalid_argument("GMM needs moment lags up to m >= 2");
  if (path.d() != net.size()) throw std::invalid_argument("path dimension does not match the network");
  if (path.N() <= cfg.m + 1) throw std::invalid_argument("path too short for the requested moment lags");

  GmmFit fit;
  fit.layout = {cfg.family, cfg.atoms, static_cast<int>(net.size()), cfg.sigma};
  const ParamLayout& layout = fit.layout;
  const Eigen::Index q = moment_count(layout.d, cfg.m);
  if (q < layout.dim()) throw std::invalid_argument("fewer moment conditions than parameters");
  fit.N = path.N();

  const Eigen::MatrixXd series = moment_statistic_series(path.values, cfg.m);
  const Eigen::VectorXd sbar = series.colwise().mean().transpose();
  const EmpiricalMoments em = empirical_moments(path, 0);
  const double delta = path.delta;

  auto objective_with = [&](const Eigen::MatrixXd& V) {
    return [&, V](const Eigen::VectorXd& xi) {
      try {
        return gmm_objective(sbar, V, layout, xi, net, cfg.m, delta);
      } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
      }
    };
  };

  const Transform full = full_transform(layout, cfg, em);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(q, q);
  const Objective stage1 = objective_with(I);

  // Seeds: optimise (theta, c) with the Levy moments profiled out by the
  // plug-in formulas, plus the caller's warm start.
  std::vector<Eigen::VectorXd> starts;
  {
    const Eigen::Index fd = layout.family_dim();
    std::vector<Bound> bounds(full.bounds().begin(), full.bounds().begin() + fd + 1);
    std::vector<SimplexBlock> simplices;
    if (layout.family == Family::sum_exp) simplices.push_back({0, layout.atoms - 1});
    const Transform reduced(std::move(bounds), std::move(simplices));
    auto profile_xi = [&](const Eigen::VectorXd& tc) {
      const MixingMeasure pi = mixing_from(layout, tc.head(fd));
      ModelParams mp{pi, tc(fd), fit_levy_moments(pi, tc(fd), em, net)};
      return pack(layout, mp);
    };
    auto profile = [&](const Eigen::VectorXd& tc) {
      try {
        return stage1(profile_xi(tc));
      } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    OptimizerConfig seed_cfg = cfg.optimizer;
    seed_cfg.xtol = std::max(seed_cfg.xtol, 1e-6);
    seed_cfg.restarts = 0;
    const OptimResult best = minimize(profile, reduced, seed_cfg);
    try {
      const Eigen::VectorXd xi0 = profile_xi(best.x);
      if (admissible(layout, xi0)) starts.push_back(xi0);
    } catch (const std::exception&) {
    }
  }
  if (cfg.warm_start) {
    if (cfg.warm_start->size() != layout.dim()) throw std::invalid_argument("warm start has the wrong length");
    if (admissible(layout, *cfg.warm_start)) starts.push_back(*cfg.warm_start);
  }
  if (starts.empty()) throw NumericalError("GMM: no admissible starting point");

  auto run_from = [&](const Objective& f, const std::vector<Eigen::VectorXd>& from) {
    OptimResult best;
    for (const auto& x0 : from) {
      OptimResult r = refine(f, full, x0, cfg.optimizer);
      if (!(r.value > best.value)) best = std::move(r);
    }
    return best;
  };

  const OptimResult s1 = run_from(stage1, starts);
  fit.xi_stage1 = s1.x;
  fit.objective_stage1 = s1.value;
  fit.F_sigma_hat = hac_longrun_cov(series, cfg.bandwidth);

  OptimResult final_run = s1;
  fit.V_N = I;
  if (cfg.two_stage) {
    fit.V_N = psd_pinv(fit.F_sigma_hat);
    final_run = run_from(objective_with(fit.V_N), {s1.x});
  }
  fit.xi_hat = final_run.x;
  fit.objective_value = final_run.value;
  fit.converged = final_run.converged;

  fit.jacobian = moment_jacobian(layout, fit.xi_hat, net, cfg.m, delta);
  try {
    const AsymptoticCov ac = asymptotic_cov(fit.jacobian, fit.V_N, fit.F_sigma_hat, fit.N);
    fit.asymptotic_cov = ac.cov;
    fit.std_errors = ac.std_errors;
  } catch (const NumericalError&) {
    fit.rank_deficient = true;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    fit.asymptotic_cov = Eigen::MatrixXd::Constant(layout.dim(), layout.dim(), nan);
    fit.std_errors = Eigen::VectorXd::Constant(layout.dim(), nan);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(fit.jacobian, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const auto names = layout.names();
    for (Eigen::Index k = 0; k < layout.dim(); ++k) {
      const bool null = k >= sv.size() || !(sv(k) > 1e-10 * sv(0));
      if (!null) continue;
      for (Eigen::Index j = 0; j < layout.dim(); ++j) {
        if (std::abs(svd.matrixV()(j, k)) > 0.1) fit.weak_directions.push_back(names[j]);
      }
    }
  }
  return fit;
}

}  // namespace graphsupou
