#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace graphsupou {

/// Seasonal-mean and moving-average decomposition used in place of LOESS.
struct PreprocessConfig {
  std::vector<Eigen::Index> periods{24, 8760};  // removed in this order
  Eigen::Index trend_window = 729;              // centred moving average; 0 disables
  double max_missing_fraction = 0.01;           // per column, filled by linear interpolation
  bool check_unit_interval = true;              // warn on values outside [0, 1]
};

struct PreprocessResult {
  Eigen::MatrixXd residuals;  // same shape as the input
  std::vector<std::string> warnings;
  std::vector<Eigen::Index> periods_removed;
  Eigen::Index filled = 0;
};

// Replaces NaN runs by linear interpolation (constant extension at the ends).
// Returns the number of filled cells; throws ConfigError when a column is
// missing more than max_fraction of its entries.
Eigen::Index fill_missing(Eigen::MatrixXd& values, double max_fraction);

// Subtracts from every sample the mean over its phase t mod period.
void remove_seasonal_means(Eigen::MatrixXd& values, Eigen::Index period);

// Centred moving average of odd-rounded width, window shrunk symmetrically
// at the ends.
Eigen::MatrixXd moving_average_trend(const Eigen::MatrixXd& values, Eigen::Index window);

// time column must be strictly increasing.
PreprocessResult preprocess(const Eigen::VectorXd& time, Eigen::MatrixXd values, const PreprocessConfig& cfg);

}  // namespace graphsupou
