#include <doctest.h>

#include "graphsupou/linops.hpp"
#include "graphsupou/model.hpp"
#include "graphsupou/params.hpp"
#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace graphsupou;

namespace {

Network two_cycle() { return Network::from_edges(2, {{0, 1}}); }
Network star() { return Network::from_edges(3, {{0, 1}, {0, 2}}); }
Network bundled() { return read_edge_list(std::string(GRAPHSUPOU_DATA_DIR) + "/network24.edges"); }

double gamma_density(double alpha, double x) { return std::exp((alpha - 1.0) * std::log(x) - x - std::lgamma(alpha)); }

// int (1/theta) e^{theta K s} Gamma(alpha, 1)(d theta) by quadrature in theta.
Eigen::MatrixXd gamma_kernel_quadrature(const Eigen::MatrixXd& K, double alpha, double s) {
  auto f = [&](double theta) {
    return Eigen::MatrixXd(oracle::series_exp(theta * s * K) * (gamma_density(alpha, theta) / theta));
  };
  // the integrand has an integrable theta^{alpha-2} singularity at 0 for
  // alpha < 2; substitute theta = u^2 to smooth it
  auto g = [&](double u) { return Eigen::MatrixXd(f(u * u) * (2.0 * u)); };
  return oracle::gauss_legendre(g, std::sqrt(80.0), 400);
}

Eigen::MatrixXd abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs(); }

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("mixing measure construction") {
  CHECK_THROWS_AS(MixingMeasure::gamma(0.0), std::invalid_argument);
  CHECK_NOTHROW(MixingMeasure::gamma(0.9));
  CHECK_THROWS_AS(MixingMeasure::dirac(0.0), std::invalid_argument);
  CHECK_THROWS_AS(MixingMeasure::sum_exp({{0.5, 1.0}, {0.4, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(MixingMeasure::sum_exp({{0.5, 1.0}, {0.5, -2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(MixingMeasure::sum_exp({{1.2, 1.0}, {-0.2, 2.0}}), std::invalid_argument);
  CHECK_NOTHROW(MixingMeasure::sum_exp({{0.5, 1.0}, {0.4, 2.0}}, true));
  CHECK(parse_family("gamma") == Family::gamma);
  CHECK(parse_family("ou") == Family::dirac);
  CHECK(parse_family("sumexp2") == Family::sum_exp);
  CHECK_THROWS(parse_family("beta"));

  const MixingMeasure two = MixingMeasure::sum_exp({{0.5, 1.0}, {0.5, 2.0}});
  const double p1 = std::exp(-1.0) / (std::exp(-1.0) + std::exp(-2.0));
  CHECK(two.atom_probabilities()[0] == doctest::Approx(p1).epsilon(1e-14));
  CHECK(two.atom_probabilities()[0] == doctest::Approx(0.7310585786).epsilon(1e-9));
}

TEST_CASE("inv_mean") {
  CHECK(inv_mean(MixingMeasure::gamma(3.0)) == doctest::Approx(0.5));
  CHECK(inv_mean(MixingMeasure::dirac(2.0)) == doctest::Approx(0.5));
  CHECK(inv_mean(MixingMeasure::sum_exp({{1.0, 2.0}})) == doctest::Approx(0.5));
  const double wbar = 0.3 * std::exp(-1.0) + 0.7 * std::exp(-4.0);
  CHECK(inv_mean(MixingMeasure::sum_exp({{0.3, 1.0}, {0.7, 4.0}})) ==
        doctest::Approx((0.3 * std::exp(-1.0) / 1.0 + 0.7 * std::exp(-4.0) / 4.0) / wbar));
  CHECK_THROWS_AS(inv_mean(MixingMeasure::gamma(1.0)), std::invalid_argument);
  CHECK(std::isinf(MixingMeasure::gamma(0.9).inverse_moment()));
}

TEST_CASE("well_defined_check") {
  CHECK(well_defined_check(MixingMeasure::gamma(1.5), -0.8).pass);
  CHECK_FALSE(well_defined_check(MixingMeasure::gamma(0.9), -0.8).pass);
  CHECK(well_defined_check(MixingMeasure::dirac(1.0), 0.3).pass);
  CHECK(well_defined_check(MixingMeasure::sum_exp({{0.5, 1.0}, {0.5, 3.0}}), 0.0).pass);
  CHECK_FALSE(well_defined_check(MixingMeasure::gamma(2.0), 1.0).pass);
  CHECK_FALSE(well_defined_check(MixingMeasure::gamma(0.9), 0.0).diagnostic.empty());
}

TEST_CASE("Gamma quantile against the incomplete-gamma oracle") {
  for (double a : {0.8, 1.5, 3.0}) {
    for (double q : {1e-3, 0.1, 0.5, 0.9}) {
      CHECK(MixingMeasure::gamma(a).quantile(q) == doctest::Approx(oracle::gamma_p_quantile(a, q)).epsilon(1e-9));
    }
  }
  CHECK(MixingMeasure::dirac(2.5).quantile(0.3) == 2.5);
  const MixingMeasure two = MixingMeasure::sum_exp({{0.5, 1.0}, {0.5, 2.0}});
  CHECK(two.quantile(0.5) == 1.0);
  CHECK(two.quantile(0.9) == 2.0);
}

TEST_CASE("Laplace-type integrals of Gamma against quadrature") {
  const double alpha = 2.5;
  const MixingMeasure g = MixingMeasure::gamma(alpha);
  for (double s : {0.0, 0.3, 4.0}) {
    double inv = 0, lap = 0, th = 0;
    const int n = 200000;
    const double top = 80.0;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) * top / n;
      const double w = gamma_density(alpha, x) * top / n;
      inv += w * std::exp(-x * s) / x;
      lap += w * std::exp(-x * s);
      th += w * x * std::exp(-x * s);
    }
    CHECK(g.inverse_laplace(s).real() == doctest::Approx(inv).epsilon(1e-6));
    CHECK(g.laplace(s) == doctest::Approx(lap).epsilon(1e-6));
    CHECK(g.theta_laplace(s) == doctest::Approx(th).epsilon(1e-6));
  }
  CHECK(g.mean() == doctest::Approx(alpha));
}

TEST_CASE("analytic_mean") {
  const Network cyc = two_cycle();
  const MixingMeasure g3 = MixingMeasure::gamma(3.0);
  CHECK(analytic_mean(g3, -0.5, LevyMomentSpec::zero(2), cyc).isZero());
  const Eigen::Vector3d m(1.0, -2.0, 0.5);
  const Eigen::VectorXd mean = analytic_mean(g3, 0.0, {m, Eigen::MatrixXd::Zero(3, 3)}, star());
  CHECK((mean - m / 2).cwiseAbs().maxCoeff() < 1e-14);

  // Neumann oracle for (-K)^{-1}
  const double c = -0.8;
  const Eigen::MatrixXd At = cyc.abar().transpose();
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd term = inv;
  for (int k = 1; k <= 400; ++k) {
    term = -c * term * At;
    inv += term;
  }
  const Eigen::Vector2d ones(1.0, 1.0);
  const Eigen::VectorXd expected = inv_mean(g3) * inv * ones;
  CHECK((analytic_mean(g3, c, {ones, Eigen::MatrixXd::Zero(2, 2)}, cyc) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("analytic_var") {
  const Network cyc = two_cycle();
  const MixingMeasure g3 = MixingMeasure::gamma(3.0);
  CHECK(analytic_var(g3, -0.5, LevyMomentSpec::zero(2), cyc).isZero());
  const LevyMomentSpec unit{Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)};
  CHECK(abs_diff(analytic_var(g3, 0.0, unit, star()), 0.25 * Eigen::MatrixXd::Identity(3, 3)).maxCoeff() < 1e-14);

  // Nested quadrature: inner Lyapunov integral for each theta, outer Gamma(3) integral.
  const double c = -0.5;
  const Eigen::MatrixXd K = drift_K(c, cyc);
  const Eigen::MatrixXd S = Eigen::MatrixXd::Identity(2, 2);
  auto inner = [&](double theta) {
    return Eigen::MatrixXd(oracle::lyapunov_quadrature(theta * K, S, theta * 0.5) * gamma_density(3.0, theta));
  };
  const Eigen::MatrixXd nested = oracle::gauss_legendre(inner, 50.0, 25);
  const Eigen::MatrixXd var = analytic_var(g3, c, {Eigen::VectorXd::Zero(2), S}, cyc);
  CHECK(abs_diff(var, nested).maxCoeff() < 1e-6);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(var);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK((var - var.transpose()).norm() == 0.0);
}

TEST_CASE("analytic_autocov") {
  const Network cyc = two_cycle();
  std::mt19937_64 rng(1);
  const LevyMomentSpec levy{Eigen::Vector2d(0.3, -0.1), oracle::random_spd(2, rng)};
  const MixingMeasure g = MixingMeasure::gamma(1.5);
  CHECK(analytic_autocov(g, -0.8, levy, cyc, 0.0, 1.0) == analytic_var(g, -0.8, levy, cyc));

  // prefactor eigenvalues (1 + (1 + c a_i) h)^{1 - alpha}
  const Eigen::MatrixXd R = analytic_autocov(g, -0.8, levy, cyc, 1.0, 1.0) * analytic_var(g, -0.8, levy, cyc).inverse();
  Eigen::VectorXd ev = R.eigenvalues().real();
  std::sort(ev.data(), ev.data() + 2);
  CHECK(ev(0) == doctest::Approx(std::pow(2.8, -0.5)).epsilon(1e-10));
  CHECK(ev(1) == doctest::Approx(std::pow(1.2, -0.5)).epsilon(1e-10));

  const MixingMeasure dirac = MixingMeasure::dirac(0.7);
  const Eigen::MatrixXd var0 = analytic_var(dirac, 0.0, levy, cyc);
  CHECK(abs_diff(analytic_autocov(dirac, 0.0, levy, cyc, 3.0, 0.5), std::exp(-0.7 * 1.5) * var0).maxCoeff() < 1e-13);

  // graph-OU reduction
  for (double c : {-0.6, 0.4}) {
    const Network s = star();
    const LevyMomentSpec l3{Eigen::VectorXd::Zero(3), oracle::random_spd(3, rng)};
    const Eigen::MatrixXd expected = mat_exp(0.7 * drift_K(c, s) * 2.0) * analytic_var(dirac, c, l3, s);
    CHECK(abs_diff(analytic_autocov(dirac, c, l3, s, 2.0, 1.0), expected).maxCoeff() < 1e-12);
  }
}

TEST_CASE("Gamma mixture kernel against theta quadrature") {
  const Network s = star();
  for (double alpha : {1.5, 3.0}) {
    for (double c : {-0.5, 0.6}) {
      const GraphSupOU model(s, MixingMeasure::gamma(alpha), c);
      for (double lag : {0.5, 3.0}) {
        const Eigen::MatrixXd q = gamma_kernel_quadrature(model.K(), alpha, lag);
        CHECK(abs_diff(model.mixture_kernel(lag), q).maxCoeff() < 1e-7);
      }
    }
  }
}

TEST_CASE("SumExp mixture kernel equals the atom-by-atom exponential sum") {
  const Network net = bundled();
  const MixingMeasure pi = MixingMeasure::sum_exp({{0.2, 0.5}, {0.5, 1.5}, {0.3, 4.0}});
  const GraphSupOU model(net, pi, -0.7);
  for (double lag : {0.0, 1.0, 7.5}) {
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(24, 24);
    const auto& atoms = std::get<SumExpLaw>(pi.law()).atoms;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      expected += pi.atom_probabilities()[i] / atoms[i].rate * mat_exp(atoms[i].rate * lag * model.K());
    }
    CHECK(abs_diff(model.mixture_kernel(lag), expected).maxCoeff() < 1e-12);
  }
}

TEST_CASE("scaled_R") {
  const Network cyc = two_cycle();
  CHECK(scaled_R(MixingMeasure::gamma(2.0), -0.3, cyc, 0.0, 1.0) == Eigen::MatrixXd::Identity(2, 2));
  const double alpha = 1.7;
  const Eigen::MatrixXd K = drift_K(-0.8, cyc);
  const Eigen::MatrixXd via_power = matrix_power_real(Eigen::MatrixXd::Identity(2, 2) - K * 2.0, 1.0 - alpha);
  CHECK(abs_diff(scaled_R(MixingMeasure::gamma(alpha), -0.8, cyc, 4.0, 0.5), via_power).maxCoeff() < 1e-13);
  const Eigen::MatrixXd ou = mat_exp(1.3 * K * 3.0);
  CHECK(abs_diff(scaled_R(MixingMeasure::dirac(1.3), -0.8, cyc, 3.0, 1.0), ou).maxCoeff() < 1e-13);

  // independent of the Levy moments
  const GraphSupOU model(star(), MixingMeasure::gamma(2.5), -0.4);
  std::mt19937_64 rng(2);
  const LevyMomentSpec l{Eigen::Vector3d(1, 2, 3), oracle::random_spd(3, rng)};
  const LevyMomentSpec l5{5.0 * l.mu_L, 5.0 * l.sigma2_L};
  const Eigen::MatrixXd R1 = model.autocov(l, 2.0, 1.0) * model.variance(l).inverse();
  const Eigen::MatrixXd R5 = model.autocov(l5, 2.0, 1.0) * model.variance(l5).inverse();
  CHECK(abs_diff(R1, R5).maxCoeff() < 1e-12);
  CHECK(abs_diff(R1, model.scaled_R(2.0, 1.0)).maxCoeff() < 1e-12);
}

TEST_CASE("rho_eigen") {
  CHECK(rho_eigen(MixingMeasure::gamma(1.5), -0.8, 1.0, 0.0, 1.0) == 1.0);
  CHECK(rho_eigen(MixingMeasure::gamma(1.5), -0.8, 1.0, 1.0, 1.0) == doctest::Approx(0.912870929).epsilon(1e-9));
  CHECK(rho_eigen(MixingMeasure::dirac(1.0), 0.0, 1.0, 2.0, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  const MixingMeasure two = MixingMeasure::sum_exp({{0.4, 0.5}, {0.6, 3.0}});
  double prev = 1.0;
  for (int h = 1; h <= 50; ++h) {
    const double r = rho_eigen(two, -0.3, 1.0, h, 1.0);
    CHECK(r < prev);
    prev = r;
  }
  CHECK_THROWS_AS(rho_eigen(MixingMeasure::gamma(1.5), -1.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("rho_eigen is the leading real eigenvalue of scaled_R") {
  const std::vector<Network> nets{two_cycle(), star(), bundled()};
  const std::vector<MixingMeasure> laws{MixingMeasure::gamma(1.5), MixingMeasure::gamma(3.2), MixingMeasure::dirac(0.8),
                                        MixingMeasure::sum_exp({{0.5, 0.4}, {0.5, 2.0}})};
  for (const auto& net : nets) {
    for (const auto& pi : laws) {
      for (double c : {-0.8, -0.2, 0.0}) {
        const GraphSupOU model(net, pi, c);
        for (int h : {0, 1, 5, 30, 100}) {
          CHECK(model.rho(h, 1.0) == doctest::Approx(leading_real_eigenvalue(model.scaled_R(h, 1.0))).epsilon(1e-8));
        }
      }
    }
  }
}

TEST_CASE("autocovariance decay of the Gamma model") {
  const Network s = star();
  const double alpha = 1.6;
  const GraphSupOU model(s, MixingMeasure::gamma(alpha), -0.5);
  const LevyMomentSpec l{Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)};
  std::vector<double> hs;
  std::vector<double> norms;
  for (double h = 100; h <= 10000; h *= 1.25) {
    hs.push_back(h);
    norms.push_back(model.autocov(l, h, 1.0).norm());
  }
  CHECK(norms.back() < 0.1 * norms.front());
  CHECK(loglog_slope(hs, norms) == doctest::Approx(-(alpha - 1.0)).epsilon(0.05));
}

TEST_CASE("zeta_bound") {
  const Network s = star();
  const MixingMeasure g = MixingMeasure::gamma(2.0);
  const double c = -0.5;
  const WeakDepParams wd = WeakDepParams::from_drift(drift_K(c, s));
  CHECK(wd.kappa_K >= 1.0);
  CHECK(wd.rho_K == doctest::Approx(1.0 + c * s.a_star()));

  const LevyMomentSpec l{Eigen::Vector3d(1.0, 0.0, -1.0), 2.0 * Eigen::MatrixXd::Identity(3, 3)};
  const double r0 = std::sqrt(wd.C * 2.0 * wd.kappa_K * wd.kappa_K * 2.0 / (2.0 * wd.rho_K) +
                              std::sqrt(2.0) * wd.kappa_K / wd.rho_K);
  CHECK(zeta_bound(g, c, l, s, wd, 0.0) == doctest::Approx(r0).epsilon(1e-13));
  CHECK(zeta_bound(g, c, LevyMomentSpec::zero(3), s, wd, 5.0) == 0.0);

  for (double alpha : {1.5, 2.5, 4.0}) {
    std::vector<double> rs;
    std::vector<double> z;
    std::vector<double> z0;
    for (double r = 100.0; r <= 1e5; r *= 1.2) {
      rs.push_back(r);
      z.push_back(zeta_bound(MixingMeasure::gamma(alpha), c, l, s, wd, r));
      z0.push_back(zeta_bound(MixingMeasure::gamma(alpha), c, {Eigen::VectorXd::Zero(3), l.sigma2_L}, s, wd, r));
    }
    CHECK(loglog_slope(rs, z) == doctest::Approx(-alpha / 2.0).epsilon(0.02));
    // without a mean only the jump term remains
    CHECK(loglog_slope(rs, z0) == doctest::Approx(-(alpha + 1.0) / 2.0).epsilon(0.02));
  }
}

TEST_CASE("parameter layout") {
  const ParamLayout gl{Family::gamma, 1, 2, SigmaStructure::diagonal};
  CHECK(gl.dim() == 1 + 1 + 2 + 2);
  const ParamLayout se{Family::sum_exp, 3, 2, SigmaStructure::full};
  CHECK(se.dim() == 5 + 1 + 2 + 3);
  CHECK(se.names().size() == static_cast<std::size_t>(se.dim()));
  CHECK(se.names()[5] == "c");

  const ModelParams p{MixingMeasure::sum_exp({{0.2, 0.5}, {0.3, 1.0}, {0.5, 2.0}}), -0.4,
                      {Eigen::Vector2d(1.0, 2.0), (Eigen::Matrix2d() << 2.0, 0.3, 0.3, 1.0).finished()}};
  const Eigen::VectorXd xi = pack(se, p);
  const ModelParams back = unpack(se, xi);
  CHECK(pack(se, back) == xi);
  CHECK(back.levy.sigma2_L == p.levy.sigma2_L);
  CHECK(admissible(se, xi));
  Eigen::VectorXd bad = xi;
  bad(se.c_index()) = 1.0;
  CHECK_FALSE(admissible(se, bad));
  bad = xi;
  bad(0) = 0.9;  // weights exceed 1
  CHECK_FALSE(admissible(se, bad));

  const ParamLayout sc{Family::dirac, 1, 2, SigmaStructure::scalar};
  const Eigen::VectorXd xs = pack(sc, p.pi.family() == Family::dirac ? p : ModelParams{MixingMeasure::dirac(1.0), 0.1, p.levy});
  CHECK(xs(sc.sigma_offset()) == doctest::Approx(1.5));
  CHECK(moment_count(2, 2) == 2 + 3 * 3);
  CHECK(moment_count(24, 2) == 24 + 3 * 300);
}

TEST_CASE("moment_vector") {
  const Network cyc = two_cycle();
  const MixingMeasure g3 = MixingMeasure::gamma(3.0);
  const LevyMomentSpec zero_mean{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
  const MomentVector mv = moment_vector({g3, 0.0, zero_mean}, cyc, 3, 1.0);
  for (int i = 0; i <= 3; ++i) {
    const Eigen::MatrixXd cov = analytic_autocov(g3, 0.0, zero_mean, cyc, i, 1.0);
    CHECK(abs_diff(mv.D[i], cov.transpose()).maxCoeff() < 1e-15);
  }
  // c = 0, sigma2 = I: D_1 = (1/2)(1 + 1)^{-2} (I / 2)
  CHECK(abs_diff(mv.D[1], 0.0625 * Eigen::MatrixXd::Identity(2, 2)).maxCoeff() < 1e-15);

  std::mt19937_64 rng(4);
  const LevyMomentSpec l{Eigen::Vector2d(1.0, 0.5), oracle::random_spd(2, rng)};
  const MomentVector full = moment_vector({MixingMeasure::dirac(1.2), -0.5, l}, cyc, 2, 0.5);
  const Eigen::VectorXd mean = analytic_mean(MixingMeasure::dirac(1.2), -0.5, l, cyc);
  CHECK(abs_diff(full.mean, mean).maxCoeff() < 1e-15);
  CHECK(abs_diff(full.D[0], analytic_var(MixingMeasure::dirac(1.2), -0.5, l, cyc) + mean * mean.transpose()).maxCoeff() <
        1e-14);
  // E(X_0 X_h^T) = cov(X_h, X_0)^T + mean mean^T
  const Eigen::MatrixXd cov2 = analytic_autocov(MixingMeasure::dirac(1.2), -0.5, l, cyc, 2.0, 0.5);
  CHECK(abs_diff(full.D[2], cov2.transpose() + mean * mean.transpose()).maxCoeff() < 1e-14);
  CHECK(full.stacked().size() == moment_count(2, 2));
}
