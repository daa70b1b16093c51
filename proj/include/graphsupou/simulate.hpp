#pragma once

#include "graphsupou/mixing.hpp"
#include "graphsupou/model.hpp"
#include "graphsupou/network.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace graphsupou {

using Rng = std::mt19937_64;

// SplitMix64 mix of (seed, stream); distinct streams give unrelated engines.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// U_i ~ N(mean, cov)
struct GaussianJumps {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// U_i = value for every jump.
struct ConstantJumps {
  Eigen::VectorXd value;
};

/// Compound-Poisson Levy seed: arrivals at rate `rate`, jumps from `jumps`.
struct CPPLevySpec {
  double rate = 1.0;
  std::variant<GaussianJumps, ConstantJumps> jumps;

  static CPPLevySpec gaussian(double rate, Eigen::VectorXd mean, Eigen::MatrixXd cov);
  // N(0, variance * I) jumps in dimension d.
  static CPPLevySpec gaussian_iid(int d, double rate, double variance = 1.0);
  static CPPLevySpec constant(double rate, Eigen::VectorXd value);

  int dim() const;
  void validate() const;
  // mu_L = rate * m, sigma2_L = rate * (S + m m^T)
  LevyMomentSpec moments() const;
};

/// Observations X_{t Delta}, t = 1..N, one row per time.
struct SamplePath {
  double delta = 1.0;
  Eigen::MatrixXd values;
  std::uint64_t seed = 0;
  std::string generator = "mt19937_64+splitmix64";
  double burn_in_horizon = 0.0;
  std::int64_t jumps = 0;
  std::vector<std::string> warnings;

  Eigen::Index N() const { return values.rows(); }
  Eigen::Index d() const { return values.cols(); }
};

struct SimConfig {
  // Pre-sample window length T_past; <= 0 selects choose_burn_in.
  double burn_in_horizon = 0.0;
  double residual_tolerance = 1e-8;
  double quantile = 1e-3;
  double max_burn_in = 1e5;
  std::uint64_t seed = 0;
};

double sample_theta2(const MixingMeasure& pi, Rng& rng);

// T_past = -ln(eps) / (theta2_q * rho_K) with theta2_q the q-quantile of pi
// and rho_K = -max Re sigma(K(c)), capped at `cap` (`capped` reports it).
double choose_burn_in(const MixingMeasure& pi, double c, const Network& net, double eps, double q,
                      double cap = 1e5, bool* capped = nullptr);
// Without the network rho_K is bounded below by 1 - |c| (a* <= 1), which
// gives a conservative horizon.
double choose_burn_in(const MixingMeasure& pi, double c, double eps, double q, double cap = 1e5,
                      bool* capped = nullptr);

// Simulates X_{t Delta}, t = 1..N, from jumps arriving on [-T_past, N Delta].
// A jump is dropped once its slowest mode has decayed below
// cfg.residual_tolerance relative to its size. Deterministic in cfg.seed.
SamplePath simulate_path(const Network& net, const MixingMeasure& pi, double c, const CPPLevySpec& levy,
                         double delta, Eigen::Index N, const SimConfig& cfg);

}  // namespace graphsupou
