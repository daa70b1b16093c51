#include "graphsupou/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace graphsupou {

std::vector<McRecord> mc_study(const Network& net, const MixingMeasure& pi, double c, const CPPLevySpec& levy,
                               double delta, Eigen::Index N, const McConfig& cfg, const Estimator& estimator) {
  if (cfg.reps < 1) throw std::invalid_argument("reps must be at least 1");
  const int jobs = std::clamp(cfg.jobs, 1, cfg.reps);

  std::vector<McRecord> records(cfg.reps);
  std::atomic<int> next{0};
  std::mutex emit_mutex;
  int emitted = 0;
  std::vector<char> done(cfg.reps, 0);

  auto run_one = [&](int r) {
    McRecord rec;
    rec.replication = r;
    rec.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
    try {
      SimConfig sim = cfg.sim;
      sim.seed = rec.seed;
      const SamplePath path = simulate_path(net, pi, c, levy, delta, N, sim);
      rec.estimates = estimator(path);
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    return rec;
  };

  // Completed records are released in replication order.
  auto worker = [&] {
    for (int r = next++; r < cfg.reps; r = next++) {
      McRecord rec = run_one(r);
      std::lock_guard<std::mutex> lock(emit_mutex);
      records[r] = std::move(rec);
      done[r] = 1;
      while (emitted < cfg.reps && done[emitted]) {
        if (cfg.on_record) cfg.on_record(records[emitted]);
        ++emitted;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return records;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

McSummary summarise(const std::vector<McRecord>& records, const std::vector<std::string>& names,
                    const Eigen::VectorXd& truth) {
  const auto p = static_cast<Eigen::Index>(names.size());
  if (truth.size() != p) throw std::invalid_argument("summarise: truth length does not match names");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  McSummary s;
  s.names = names;
  s.truth = truth;
  s.median = Eigen::VectorXd::Constant(p, nan);
  s.mae = Eigen::VectorXd::Constant(p, nan);
  s.median_abs_error = Eigen::VectorXd::Constant(p, nan);
  s.rmse = Eigen::VectorXd::Constant(p, nan);
  for (const auto& r : records) {
    if (r.ok && r.estimates.size() == p) {
      ++s.succeeded;
    } else {
      ++s.failed;
    }
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    std::vector<double> est;
    std::vector<double> err;
    double sum_abs = 0.0;
    double sum_sq = 0.0;
    for (const auto& r : records) {
      if (!r.ok || r.estimates.size() != p || !std::isfinite(r.estimates(j))) continue;
      est.push_back(r.estimates(j));
      if (std::isfinite(truth(j))) {
        const double e = r.estimates(j) - truth(j);
        err.push_back(std::abs(e));
        sum_abs += std::abs(e);
        sum_sq += e * e;
      }
    }
    s.median(j) = median(est);
    if (!err.empty()) {
      const auto n = static_cast<double>(err.size());
      s.mae(j) = sum_abs / n;
      s.rmse(j) = std::sqrt(sum_sq / n);
      s.median_abs_error(j) = median(err);
    }
  }
  return s;
}

}  // namespace graphsupou
