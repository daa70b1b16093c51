#include "graphsupou/preprocess.hpp"

#include "graphsupou/errors.hpp"

#include <cmath>
#include <sstream>

namespace graphsupou {

Eigen::Index fill_missing(Eigen::MatrixXd& values, double max_fraction) {
  const Eigen::Index N = values.rows();
  Eigen::Index filled = 0;
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    auto col = values.col(j);
    const Eigen::Index missing = col.array().isNaN().count();
    if (missing == 0) continue;
    if (static_cast<double>(missing) > max_fraction * static_cast<double>(N) || missing == N) {
      std::ostringstream msg;
      msg << "column " << (j + 1) << " is missing " << missing << " of " << N << " values (limit "
          << max_fraction * 100.0 << "%)";
      throw ConfigError(msg.str());
    }
    Eigen::Index prev = -1;
    for (Eigen::Index t = 0; t <= N; ++t) {
      if (t < N && std::isnan(col(t))) continue;
      if (t - prev > 1) {
        for (Eigen::Index k = prev + 1; k < t; ++k) {
          if (prev < 0) {
            col(k) = col(t);
          } else if (t == N) {
            col(k) = col(prev);
          } else {
            const double w = static_cast<double>(k - prev) / static_cast<double>(t - prev);
            col(k) = (1.0 - w) * col(prev) + w * col(t);
          }
        }
      }
      prev = t;
    }
    filled += missing;
  }
  return filled;
}

void remove_seasonal_means(Eigen::MatrixXd& values, Eigen::Index period) {
  if (period < 1) throw std::invalid_argument("seasonal period must be positive");
  const Eigen::Index N = values.rows();
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(period, values.cols());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(period);
  for (Eigen::Index t = 0; t < N; ++t) {
    sums.row(t % period) += values.row(t);
    counts(t % period) += 1.0;
  }
  for (Eigen::Index t = 0; t < N; ++t) values.row(t) -= sums.row(t % period) / counts(t % period);
}

Eigen::MatrixXd moving_average_trend(const Eigen::MatrixXd& values, Eigen::Index window) {
  const Eigen::Index N = values.rows();
  const Eigen::Index half = std::max<Eigen::Index>(0, window / 2);
  Eigen::MatrixXd prefix = Eigen::MatrixXd::Zero(N + 1, values.cols());
  for (Eigen::Index t = 0; t < N; ++t) prefix.row(t + 1) = prefix.row(t) + values.row(t);
  Eigen::MatrixXd trend(N, values.cols());
  for (Eigen::Index t = 0; t < N; ++t) {
    const Eigen::Index h = std::min({half, t, N - 1 - t});
    trend.row(t) = (prefix.row(t + h + 1) - prefix.row(t - h)) / static_cast<double>(2 * h + 1);
  }
  return trend;
}

PreprocessResult preprocess(const Eigen::VectorXd& time, Eigen::MatrixXd values, const PreprocessConfig& cfg) {
  if (time.size() != values.rows()) throw std::invalid_argument("time column length does not match the values");
  for (Eigen::Index t = 1; t < time.size(); ++t) {
    if (!(time(t) > time(t - 1))) {
      throw ConfigError("time column is not strictly increasing at row " + std::to_string(t + 1));
    }
  }
  if (cfg.trend_window < 0) throw std::invalid_argument("trend window must be >= 0");

  PreprocessResult res;
  res.filled = fill_missing(values, cfg.max_missing_fraction);
  if (cfg.check_unit_interval) {
    const Eigen::Index outside = (values.array() < 0.0 || values.array() > 1.0).count();
    if (outside > 0) {
      res.warnings.push_back(std::to_string(outside) + " values lie outside [0, 1]");
    }
  }
  for (const Eigen::Index p : cfg.periods) {
    if (p < 1) throw std::invalid_argument("seasonal period must be positive");
    if (values.rows() < 2 * p) {
      res.warnings.push_back("period " + std::to_string(p) + " skipped: fewer than two full cycles");
      continue;
    }
    remove_seasonal_means(values, p);
    res.periods_removed.push_back(p);
  }
  if (cfg.trend_window > 1) values -= moving_average_trend(values, cfg.trend_window);
  res.residuals = std::move(values);
  return res;
}

}  // namespace graphsupou
