#include <doctest.h>

#include "graphsupou/optimize.hpp"

#include <cmath>

using namespace graphsupou;

TEST_CASE("bound transforms round trip") {
  const Bound iv = Bound::interval(-1.0, 1.0);
  const Bound lo = Bound::lower(1.0, 1.0, 5.0);
  const Bound fr = Bound::free(-3.0, 3.0);
  for (double x : {-0.999, -0.3, 0.0, 0.7, 0.9999}) CHECK(iv.from_unbounded(iv.to_unbounded(x)) == doctest::Approx(x).epsilon(1e-12));
  for (double x : {1.0001, 2.0, 50.0}) CHECK(lo.from_unbounded(lo.to_unbounded(x)) == doctest::Approx(x).epsilon(1e-12));
  CHECK(fr.to_unbounded(2.5) == 2.5);
  for (double z : {-800.0, -30.0, 0.0, 30.0, 800.0}) {
    const double x = iv.from_unbounded(z);
    CHECK(x > -1.0);
    CHECK(x < 1.0);
    CHECK(lo.from_unbounded(z) > 1.0);
  }
}

TEST_CASE("simplex block") {
  const Transform t({Bound::free(0, 1), Bound::free(0, 1), Bound::lower(0.0, 0.0, 1.0)}, {{0, 2}});
  const Eigen::Vector3d x(0.2, 0.5, 3.0);
  const Eigen::VectorXd back = t.from_unbounded(t.to_unbounded(x));
  CHECK((back - x).cwiseAbs().maxCoeff() < 1e-12);
  for (double a : {-40.0, 0.0, 40.0}) {
    const Eigen::VectorXd y = t.from_unbounded(Eigen::Vector3d(a, -a, 0.0));
    CHECK(y(0) >= 0.0);
    CHECK(y(1) >= 0.0);
    CHECK(y(0) + y(1) <= 1.0);
  }
}

TEST_CASE("nelder_mead on Rosenbrock") {
  const Objective rosen = [](const Eigen::VectorXd& x) {
    return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
  };
  OptimizerConfig cfg;
  const OptimResult r = nelder_mead(rosen, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(0.5, 0.5), cfg);
  CHECK(r.converged);
  CHECK(std::abs(r.x(0) - 1.0) < 1e-6);
  CHECK(std::abs(r.x(1) - 1.0) < 1e-6);
}

TEST_CASE("minimize respects bounds and finds boundary-adjacent optima") {
  // optimum outside the box: the result approaches the upper bound from inside
  const Transform t({Bound::interval(1.0, 3.0), Bound::interval(-1.0, 1.0)});
  int infeasible = 0;
  const Objective f = [&](const Eigen::VectorXd& x) {
    if (x(0) <= 1.0 || x(0) >= 3.0 || std::abs(x(1)) >= 1.0) ++infeasible;
    return std::pow(x(0) - 2.2, 2) + std::pow(x(1) + 0.4, 2);
  };
  const OptimResult r = minimize(f, t, OptimizerConfig{});
  CHECK(infeasible == 0);
  CHECK(std::abs(r.x(0) - 2.2) < 1e-6);
  CHECK(std::abs(r.x(1) + 0.4) < 1e-6);

  // higher dimension seeds by Halton points
  const Transform t4({Bound::free(-5, 5), Bound::free(-5, 5), Bound::lower(0.0, 0.0, 4.0), Bound::interval(0.0, 1.0)});
  const Objective g = [](const Eigen::VectorXd& x) {
    return std::pow(x(0) - 1, 2) + std::pow(x(1) + 2, 2) + std::pow(x(2) - 0.5, 2) + std::pow(x(3) - 0.25, 2);
  };
  const OptimResult r4 = minimize(g, t4, OptimizerConfig{});
  CHECK((r4.x - Eigen::Vector4d(1, -2, 0.5, 0.25)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("non-finite objective values are avoided") {
  const Transform t({Bound::free(-2, 2)});
  const Objective f = [](const Eigen::VectorXd& x) {
    return x(0) < 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::pow(x(0) - 0.5, 2);
  };
  const OptimResult r = minimize(f, t, OptimizerConfig{});
  CHECK(std::abs(r.x(0) - 0.5) < 1e-6);
}

TEST_CASE("halton_point") {
  CHECK(halton_point(1, 2)(0) == doctest::Approx(0.5));
  CHECK(halton_point(1, 2)(1) == doctest::Approx(1.0 / 3.0));
  CHECK(halton_point(2, 2)(0) == doctest::Approx(0.25));
  CHECK(halton_point(3, 2)(1) == doctest::Approx(1.0 / 9.0));
}
