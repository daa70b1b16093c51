#pragma once

#include "graphsupou/simulate.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace graphsupou {

// Estimates from one replication, in the order of McConfig::names.
using Estimator = std::function<Eigen::VectorXd(const SamplePath&)>;

struct McRecord {
  int replication = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  Eigen::VectorXd estimates;
};

struct McConfig {
  int reps = 1;
  int jobs = 1;
  std::uint64_t seed = 0;
  SimConfig sim;  // sim.seed is replaced by the per-replication seed
  std::vector<std::string> names;
  // Called once per replication in replication order, from any thread but
  // never concurrently.
  std::function<void(const McRecord&)> on_record;
};

// Replication r is simulated with seed derive_seed(cfg.seed, r), so results
// do not depend on the number of jobs. Failures are recorded, not thrown.
std::vector<McRecord> mc_study(const Network& net, const MixingMeasure& pi, double c, const CPPLevySpec& levy,
                               double delta, Eigen::Index N, const McConfig& cfg, const Estimator& estimator);

struct McSummary {
  std::vector<std::string> names;
  Eigen::VectorXd truth;  // NaN where unknown
  Eigen::VectorXd median;
  Eigen::VectorXd mae;  // mean absolute error against truth
  Eigen::VectorXd median_abs_error;
  Eigen::VectorXd rmse;
  int succeeded = 0;
  int failed = 0;
};

McSummary summarise(const std::vector<McRecord>& records, const std::vector<std::string>& names,
                    const Eigen::VectorXd& truth);

double median(std::vector<double> values);

}  // namespace graphsupou
