#include "graphsupou/simulate.hpp"

#include "graphsupou/errors.hpp"
#include "graphsupou/linops.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace graphsupou {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ mix(stream + 0x632be59bd9b4e019ULL));
}

CPPLevySpec CPPLevySpec::gaussian(double rate, Eigen::VectorXd mean, Eigen::MatrixXd cov) {
  CPPLevySpec spec{rate, GaussianJumps{std::move(mean), std::move(cov)}};
  spec.validate();
  return spec;
}

CPPLevySpec CPPLevySpec::gaussian_iid(int d, double rate, double variance) {
  return gaussian(rate, Eigen::VectorXd::Zero(d), variance * Eigen::MatrixXd::Identity(d, d));
}

CPPLevySpec CPPLevySpec::constant(double rate, Eigen::VectorXd value) {
  CPPLevySpec spec{rate, ConstantJumps{std::move(value)}};
  spec.validate();
  return spec;
}

int CPPLevySpec::dim() const {
  if (const auto* g = std::get_if<GaussianJumps>(&jumps)) return static_cast<int>(g->mean.size());
  return static_cast<int>(std::get<ConstantJumps>(jumps).value.size());
}

void CPPLevySpec::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("jump rate must be positive and finite");
  if (const auto* g = std::get_if<GaussianJumps>(&jumps)) {
    LevyMomentSpec{g->mean, g->cov}.validate(static_cast<int>(g->mean.size()));
  } else if (!std::get<ConstantJumps>(jumps).value.allFinite()) {
    throw std::invalid_argument("constant jump must be finite");
  }
}

LevyMomentSpec CPPLevySpec::moments() const {
  if (const auto* g = std::get_if<GaussianJumps>(&jumps)) {
    return {rate * g->mean, rate * (g->cov + g->mean * g->mean.transpose())};
  }
  const auto& v = std::get<ConstantJumps>(jumps).value;
  return {rate * v, rate * v * v.transpose()};
}

namespace {

class ThetaSampler {
 public:
  explicit ThetaSampler(const MixingMeasure& pi) : pi_(pi) {
    if (const auto* g = std::get_if<GammaLaw>(&pi.law())) {
      gamma_ = std::gamma_distribution<double>(g->alpha, 1.0);
    } else if (const auto* s = std::get_if<SumExpLaw>(&pi.law())) {
      const auto& p = pi.atom_probabilities();
      atom_ = std::discrete_distribution<std::size_t>(p.begin(), p.end());
      rates_.reserve(s->atoms.size());
      for (const auto& a : s->atoms) rates_.push_back(a.rate);
    }
  }

  double operator()(Rng& rng) {
    switch (pi_.family()) {
      case Family::gamma:
        return gamma_(rng);
      case Family::sum_exp:
        return rates_[atom_(rng)];
      case Family::dirac:
        return std::get<DiracLaw>(pi_.law()).rate;
    }
    return 0.0;
  }

 private:
  const MixingMeasure& pi_;
  std::gamma_distribution<double> gamma_;
  std::discrete_distribution<std::size_t> atom_;
  std::vector<double> rates_;
};

class JumpSampler {
 public:
  explicit JumpSampler(const CPPLevySpec& levy) : levy_(levy) {
    if (const auto* g = std::get_if<GaussianJumps>(&levy.jumps)) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g->cov + g->cov.transpose()));
      root_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
              es.eigenvectors().transpose();
    }
  }

  Eigen::VectorXd operator()(Rng& rng) {
    if (const auto* g = std::get_if<GaussianJumps>(&levy_.jumps)) {
      Eigen::VectorXd z(g->mean.size());
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal_(rng);
      return g->mean + root_ * z;
    }
    return std::get<ConstantJumps>(levy_.jumps).value;
  }

 private:
  const CPPLevySpec& levy_;
  Eigen::MatrixXd root_;
  std::normal_distribution<double> normal_;
};

struct Jump {
  double tau;
  double theta;
  Eigen::VectorXd size;
};

// Adds e^{theta K (t Delta - tau)} U (in whatever coordinates the
// accumulator uses) to every observation t with tau <= t Delta until the
// jump's envelope drops below the tolerance.
struct Window {
  double delta;
  Eigen::Index N;
  double rho;
  double log_tol;

  // Observation index range [first, last] touched by a jump; empty if last < first.
  std::pair<Eigen::Index, Eigen::Index> span(double tau, double theta) const {
    const Eigen::Index first = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(tau / delta)));
    const double life = -log_tol / (theta * rho);
    const double end = (tau + life) / delta;
    const Eigen::Index last =
        end >= static_cast<double>(N) ? N : static_cast<Eigen::Index>(std::floor(end));
    return {first, last};
  }
};

template <typename Scalar>
void accumulate_eigen(const std::vector<Jump>& jumps, const Window& w,
                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& k,
                      const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& Uinv,
                      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& Z) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  for (const auto& j : jumps) {
    const auto [first, last] = w.span(j.tau, j.theta);
    if (last < first) continue;
    const Vec y = Uinv * j.size.cast<Scalar>();
    const double s0 = static_cast<double>(first) * w.delta - j.tau;
    Vec cur = y.cwiseProduct(((j.theta * s0) * k).array().exp().matrix());
    const Vec step = ((j.theta * w.delta) * k).array().exp().matrix();
    for (Eigen::Index t = first; t <= last; ++t) {
      Z.row(t - 1) += cur.transpose();
      cur = cur.cwiseProduct(step);
    }
  }
}

void accumulate_dense(const std::vector<Jump>& jumps, const Window& w, const Eigen::MatrixXd& K,
                      Eigen::MatrixXd& X) {
  for (const auto& j : jumps) {
    const auto [first, last] = w.span(j.tau, j.theta);
    if (last < first) continue;
    const double s0 = static_cast<double>(first) * w.delta - j.tau;
    Eigen::VectorXd cur = mat_exp(j.theta * s0 * K) * j.size;
    const Eigen::MatrixXd step = mat_exp(j.theta * w.delta * K);
    for (Eigen::Index t = first; t <= last; ++t) {
      X.row(t - 1) += cur.transpose();
      cur = step * cur;
    }
  }
}

double decay_rate(double c, const Network& net) { return -spectral_abscissa(drift_K(c, net)); }

double burn_in_from_rate(const MixingMeasure& pi, double rho, double eps, double q, double cap, bool* capped) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("residual tolerance must lie in (0, 1)");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  const double horizon = -std::log(eps) / (pi.quantile(q) * rho);
  const bool over = !(horizon <= cap);
  if (capped) *capped = over;
  return over ? cap : horizon;
}

}  // namespace

double sample_theta2(const MixingMeasure& pi, Rng& rng) { return ThetaSampler(pi)(rng); }

double choose_burn_in(const MixingMeasure& pi, double c, const Network& net, double eps, double q, double cap,
                      bool* capped) {
  return burn_in_from_rate(pi, decay_rate(c, net), eps, q, cap, capped);
}

double choose_burn_in(const MixingMeasure& pi, double c, double eps, double q, double cap, bool* capped) {
  if (!(std::abs(c) < 1.0)) throw std::invalid_argument("|c| must be < 1");
  return burn_in_from_rate(pi, 1.0 - std::abs(c), eps, q, cap, capped);
}

SamplePath simulate_path(const Network& net, const MixingMeasure& pi, double c, const CPPLevySpec& levy,
                         double delta, Eigen::Index N, const SimConfig& cfg) {
  levy.validate();
  if (levy.dim() != net.size()) throw std::invalid_argument("jump dimension does not match the network");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (N < 1) throw std::invalid_argument("N must be at least 1");
  if (!(cfg.residual_tolerance > 0.0 && cfg.residual_tolerance < 1.0)) {
    throw std::invalid_argument("residual tolerance must lie in (0, 1)");
  }
  const WellDefinedReport wd = well_defined_check(pi, c);
  if (!wd.pass) throw std::invalid_argument(wd.diagnostic);

  const Eigen::MatrixXd K = drift_K(c, net);
  const Diagonalization eig(K);
  const double rho = -eig.values().real().maxCoeff();
  if (!(rho > 0.0)) throw NumericalError("K(c) is not stable");

  SamplePath path;
  path.delta = delta;
  path.seed = cfg.seed;
  if (cfg.burn_in_horizon > 0.0) {
    path.burn_in_horizon = cfg.burn_in_horizon;
  } else {
    bool capped = false;
    path.burn_in_horizon = burn_in_from_rate(pi, rho, cfg.residual_tolerance, cfg.quantile, cfg.max_burn_in, &capped);
    if (capped) {
      std::ostringstream msg;
      msg << "burn-in horizon capped at " << cfg.max_burn_in << "; pre-sample truncation bias may exceed tolerance";
      path.warnings.push_back(msg.str());
    }
  }

  // In-window arrivals run forward from 0, pre-sample arrivals backward from
  // 0, each on its own stream: a longer horizon only appends older jumps.
  const double T = static_cast<double>(N) * delta;
  std::vector<Jump> jumps;
  ThetaSampler theta(pi);
  JumpSampler jump(levy);
  std::exponential_distribution<double> gap(levy.rate);
  auto draw = [&](Rng& rng, double tau) {
    const double th = theta(rng);
    Eigen::VectorXd u = jump(rng);
    if (!u.allFinite() || !std::isfinite(th) || !(th > 0.0)) throw NumericalError("non-finite jump draw");
    jumps.push_back({tau, th, std::move(u)});
  };
  {
    Rng rng(derive_seed(cfg.seed, 0));
    for (double tau = gap(rng); tau <= T; tau += gap(rng)) draw(rng, tau);
  }
  {
    Rng rng(derive_seed(cfg.seed, 1));
    for (double tau = -gap(rng); tau >= -path.burn_in_horizon; tau -= gap(rng)) draw(rng, tau);
  }
  path.jumps = static_cast<std::int64_t>(jumps.size());

  const Window w{delta, N, rho, std::log(cfg.residual_tolerance)};
  const Eigen::Index d = net.size();
  if (eig.defective()) {
    path.warnings.push_back("K(c) is numerically defective; using per-jump matrix exponentials");
    path.values = Eigen::MatrixXd::Zero(N, d);
    accumulate_dense(jumps, w, K, path.values);
  } else if (eig.is_real()) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Z =
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(N, d);
    const Eigen::VectorXd k = eig.values().real();
    const Eigen::MatrixXd Uinv = eig.inverse_vectors().real();
    accumulate_eigen<double>(jumps, w, k, Uinv, Z);
    path.values = Z * eig.vectors().real().transpose();
  } else {
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Z =
        Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(N, d);
    accumulate_eigen<std::complex<double>>(jumps, w, eig.values(), eig.inverse_vectors(), Z);
    path.values = (Z * eig.vectors().transpose()).real();
  }
  if (!path.values.allFinite()) throw NumericalError("simulated path is not finite");
  return path;
}

}  // namespace graphsupou
