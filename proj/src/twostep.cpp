#include "graphsupou/twostep.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace graphsupou {

namespace {

MixingMeasure make_mixing(const TwoStepConfig& cfg, const Eigen::VectorXd& x) {
  switch (cfg.family) {
    case Family::gamma:
      return MixingMeasure::gamma(x(0));
    case Family::dirac:
      return MixingMeasure::dirac(x(0));
    case Family::sum_exp: {
      const int K = cfg.atoms;
      std::vector<ExpAtom> atoms(K);
      double rest = 1.0;
      for (int i = 0; i + 1 < K; ++i) {
        atoms[i].weight = x(i);
        rest -= x(i);
      }
      atoms.back().weight = std::max(rest, 0.0);
      for (int i = 0; i < K; ++i) atoms[i].rate = x(K - 1 + i);
      return MixingMeasure::sum_exp(atoms, true);
    }
  }
  throw std::invalid_argument("unknown family");
}

// Coordinates (theta, c) with c last.
Transform curve_transform(const TwoStepConfig& cfg) {
  std::vector<Bound> bounds;
  std::vector<SimplexBlock> simplices;
  switch (cfg.family) {
    case Family::gamma:
      bounds.push_back(Bound::interval(1.0, cfg.alpha_max));
      break;
    case Family::dirac:
      bounds.push_back(Bound::interval(0.0, cfg.rate_max, 1e-2, std::min(10.0, cfg.rate_max)));
      break;
    case Family::sum_exp:
      for (int i = 0; i + 1 < cfg.atoms; ++i) bounds.push_back(Bound::free(0.0, 1.0));
      for (int i = 0; i < cfg.atoms; ++i) {
        bounds.push_back(Bound::interval(0.0, cfg.rate_max, 1e-2, std::min(10.0, cfg.rate_max)));
      }
      simplices.push_back({0, cfg.atoms - 1});
      break;
  }
  bounds.push_back(Bound::interval(-1.0, 1.0));
  return Transform(std::move(bounds), std::move(simplices));
}

}  // namespace

CurveFit fit_eigen_curve(const std::vector<LagEigen>& l_hat, double a_star, double delta,
                         const TwoStepConfig& cfg) {
  if (l_hat.empty()) throw std::invalid_argument("fit_eigen_curve: no lags");
  if (cfg.family == Family::sum_exp && cfg.atoms < 1) throw std::invalid_argument("SumExp needs at least one atom");
  const Transform tr = curve_transform(cfg);
  const Eigen::Index ci = tr.dim() - 1;
  const double inv_n = 1.0 / static_cast<double>(l_hat.size());

  auto loss = [&](const Eigen::VectorXd& x) {
    try {
      const MixingMeasure pi = make_mixing(cfg, x);
      double sum = 0.0;
      for (const auto& p : l_hat) {
        const double r = p.l_hat - rho_eigen(pi, x(ci), a_star, static_cast<double>(p.h), delta);
        sum += r * r;
      }
      return sum * inv_n;
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const OptimResult opt = minimize(loss, tr, cfg.optimizer);
  CurveFit fit;
  fit.pi = make_mixing(cfg, opt.x);
  fit.c = opt.x(ci);
  fit.loss = opt.value;
  fit.converged = opt.converged;
  fit.evaluations = opt.evaluations;
  fit.identifiable = cfg.family == Family::gamma;
  return fit;
}

Eigen::VectorXd TwoStepFit::theta_hat() const {
  if (const auto* g = std::get_if<GammaLaw>(&pi.law())) return Eigen::VectorXd::Constant(1, g->alpha);
  if (const auto* d = std::get_if<DiracLaw>(&pi.law())) return Eigen::VectorXd::Constant(1, d->rate);
  const auto& atoms = std::get<SumExpLaw>(pi.law()).atoms;
  const auto K = static_cast<Eigen::Index>(atoms.size());
  Eigen::VectorXd out(2 * K);
  for (Eigen::Index i = 0; i < K; ++i) {
    out(i) = atoms[i].weight;
    out(K + i) = atoms[i].rate;
  }
  return out;
}

std::vector<std::string> TwoStepFit::theta_names() const {
  switch (pi.family()) {
    case Family::gamma:
      return {"alpha"};
    case Family::dirac:
      return {"lambda"};
    case Family::sum_exp: {
      const auto K = std::get<SumExpLaw>(pi.law()).atoms.size();
      std::vector<std::string> names;
      for (std::size_t i = 1; i <= K; ++i) names.push_back("w" + std::to_string(i));
      for (std::size_t i = 1; i <= K; ++i) names.push_back("lambda" + std::to_string(i));
      return names;
    }
  }
  return {};
}

LevyMomentSpec fit_levy_moments(const MixingMeasure& pi_hat, double c_hat, const EmpiricalMoments& em,
                                const Network& net) {
  if (em.d() != net.size()) throw std::invalid_argument("fit_levy_moments: dimension mismatch");
  const Eigen::MatrixXd K = drift_K(c_hat, net);
  const double im = inv_mean(pi_hat);
  LevyMomentSpec out;
  out.mu_L = -(K * em.mean) / im;
  const Eigen::MatrixXd S = -(K * em.var + em.var * K.transpose()) / im;
  out.sigma2_L = 0.5 * (S + S.transpose());
  return out;
}

TwoStepFit twostep_fit(const EmpiricalMoments& em, const Network& net, const TwoStepConfig& cfg) {
  if (cfg.n_star < 1 || cfg.n_star > em.N - 1) throw std::invalid_argument("N* must lie in [1, N - 1]");
  if (cfg.n_star > em.h_max()) throw std::invalid_argument("empirical moments do not reach lag N*");
  if (em.d() != net.size()) throw std::invalid_argument("path dimension does not match the network");

  const std::vector<LagEigen> series = leading_eig_series(em, 1, cfg.n_star);
  const CurveFit curve = fit_eigen_curve(series, net.a_star(), em.delta, cfg);

  TwoStepFit fit;
  fit.pi = curve.pi;
  fit.c_hat = curve.c;
  fit.loss_value = curve.loss;
  fit.converged = curve.converged;
  fit.identifiable = curve.identifiable;
  fit.n_star = cfg.n_star;
  fit.lags.reserve(series.size());
  for (const auto& p : series) {
    fit.lags.push_back({p.h, p.l_hat, rho_eigen(fit.pi, fit.c_hat, net.a_star(), static_cast<double>(p.h), em.delta)});
  }
  const LevyMomentSpec levy = fit_levy_moments(fit.pi, fit.c_hat, em, net);
  fit.mu_L_hat = levy.mu_L;
  fit.sigma2_L_hat = levy.sigma2_L;
  return fit;
}

TwoStepFit twostep_fit(const SamplePath& path, const Network& net, const TwoStepConfig& cfg) {
  if (cfg.n_star < 1 || cfg.n_star > path.N() - 1) throw std::invalid_argument("N* must lie in [1, N - 1]");
  return twostep_fit(empirical_moments(path, cfg.n_star), net, cfg);
}

}  // namespace graphsupou
