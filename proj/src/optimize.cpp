#include "graphsupou/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace graphsupou {

Bound Bound::interval(double lo, double hi) {
  const double pad = 1e-3 * (hi - lo);
  return interval(lo, hi, lo + pad, hi - pad);
}

Bound Bound::interval(double lo, double hi, double seed_lo, double seed_hi) {
  if (!(lo < hi)) throw std::invalid_argument("interval bound needs lo < hi");
  return {Kind::interval, lo, hi, seed_lo, seed_hi};
}

Bound Bound::lower(double lo, double seed_lo, double seed_hi) {
  return {Kind::lower, lo, std::numeric_limits<double>::infinity(), seed_lo, seed_hi};
}

Bound Bound::free(double seed_lo, double seed_hi) {
  return {Kind::free, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), seed_lo,
          seed_hi};
}

double Bound::to_unbounded(double x) const {
  switch (kind) {
    case Kind::interval: {
      const double u = std::clamp((x - lo) / (hi - lo), 1e-15, 1.0 - 1e-15);
      return std::log(u / (1.0 - u));
    }
    case Kind::lower: {
      const double y = std::max(x - lo, 1e-300);
      return y > 30.0 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
    }
    case Kind::free:
      return x;
  }
  return x;
}

double Bound::from_unbounded(double z) const {
  switch (kind) {
    case Kind::interval: {
      const double u = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
      const double pad = 1e-12 * (hi - lo);
      return std::clamp(lo + (hi - lo) * u, lo + pad, hi - pad);
    }
    case Kind::lower: {
      const double y = z > 30.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
      return std::max(lo + y, lo + 1e-12 * std::max(1.0, std::abs(lo)));
    }
    case Kind::free:
      return z;
  }
  return z;
}

Transform::Transform(std::vector<Bound> bounds, std::vector<SimplexBlock> simplices)
    : bounds_(std::move(bounds)), simplices_(std::move(simplices)) {
  for (const auto& s : simplices_) {
    if (s.start < 0 || s.size < 0 || s.start + s.size > dim()) throw std::invalid_argument("simplex block out of range");
  }
}

bool Transform::in_simplex(Eigen::Index i) const {
  return std::any_of(simplices_.begin(), simplices_.end(),
                     [i](const SimplexBlock& s) { return i >= s.start && i < s.start + s.size; });
}

Eigen::VectorXd Transform::to_unbounded(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd xc = clamp(x);
  Eigen::VectorXd z(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (!in_simplex(i)) z(i) = bounds_[i].to_unbounded(xc(i));
  }
  for (const auto& s : simplices_) {
    const double last = 1.0 - xc.segment(s.start, s.size).sum();
    for (Eigen::Index i = s.start; i < s.start + s.size; ++i) z(i) = std::log(xc(i) / last);
  }
  return z;
}

Eigen::VectorXd Transform::from_unbounded(const Eigen::VectorXd& z) const {
  Eigen::VectorXd x(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (!in_simplex(i)) x(i) = bounds_[i].from_unbounded(z(i));
  }
  for (const auto& s : simplices_) {
    const auto block = z.segment(s.start, s.size);
    const double top = std::max(0.0, s.size > 0 ? block.maxCoeff() : 0.0);
    const Eigen::ArrayXd e = (block.array() - top).exp();
    const double denom = std::exp(-top) + e.sum();
    x.segment(s.start, s.size) = (e / denom).matrix();
  }
  return x;
}

Eigen::VectorXd Transform::clamp(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw std::invalid_argument("parameter vector has the wrong length");
  Eigen::VectorXd out = x;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (in_simplex(i)) continue;
    const Bound& b = bounds_[i];
    if (b.kind == Bound::Kind::interval) {
      const double pad = 1e-12 * (b.hi - b.lo);
      out(i) = std::clamp(out(i), b.lo + pad, b.hi - pad);
    } else if (b.kind == Bound::Kind::lower) {
      out(i) = std::max(out(i), b.lo + 1e-12 * std::max(1.0, std::abs(b.lo)));
    }
  }
  for (const auto& s : simplices_) {
    auto block = out.segment(s.start, s.size);
    block = block.cwiseMax(1e-12);
    const double total = block.sum();
    if (total > 1.0 - 1e-12) block *= (1.0 - 1e-12) / (total + 1e-12);
  }
  return out;
}

Eigen::VectorXd halton_point(std::uint64_t index, Eigen::Index dim) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                               59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
  constexpr Eigen::Index count = sizeof(primes) / sizeof(primes[0]);
  if (dim > count) throw std::invalid_argument("halton_point: dimension too large");
  Eigen::VectorXd u(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const int b = primes[j];
    double f = 1.0;
    double r = 0.0;
    for (std::uint64_t i = index; i > 0; i /= b) {
      f /= b;
      r += f * static_cast<double>(i % b);
    }
    u(j) = r;
  }
  return u;
}

OptimResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                        const OptimizerConfig& cfg) {
  const Eigen::Index n = x0.size();
  OptimResult res;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  if (n == 0) {
    res.x = x0;
    res.value = eval(x0);
    res.converged = true;
    return res;
  }

  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double gamma = 1.0 + 2.0 / dn;
  const double rho = 0.75 - 1.0 / (2.0 * dn);
  const double sigma = 1.0 - 1.0 / dn;

  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) pts[i + 1](i) += step(i);
  for (Eigen::Index i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<Eigen::Index> order(n + 1);
  for (res.iterations = 0; res.iterations < cfg.max_iterations; ++res.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return vals[a] < vals[b]; });
    {
      std::vector<Eigen::VectorXd> p2(n + 1);
      std::vector<double> v2(n + 1);
      for (Eigen::Index i = 0; i <= n; ++i) {
        p2[i] = std::move(pts[order[i]]);
        v2[i] = vals[order[i]];
      }
      pts = std::move(p2);
      vals = std::move(v2);
    }

    double diameter = 0.0;
    for (Eigen::Index i = 1; i <= n; ++i) diameter = std::max(diameter, (pts[i] - pts[0]).cwiseAbs().maxCoeff());
    const double spread = vals[n] - vals[0];
    if (diameter <= cfg.xtol && (spread <= cfg.ftol || !std::isfinite(spread))) {
      res.converged = true;
      break;
    }
    if (diameter <= 1e-3 * cfg.xtol) {
      // Collapsed simplex over a flat or non-finite region.
      res.converged = std::isfinite(vals[0]);
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += pts[i];
    centroid /= dn;

    const Eigen::VectorXd xr = centroid + alpha * (centroid - pts[n]);
    const double fr = eval(xr);
    if (fr < vals[0]) {
      const Eigen::VectorXd xe = centroid + gamma * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[n] = xe;
        vals[n] = fe;
      } else {
        pts[n] = xr;
        vals[n] = fr;
      }
      continue;
    }
    if (fr < vals[n - 1]) {
      pts[n] = xr;
      vals[n] = fr;
      continue;
    }
    const bool outside = fr < vals[n];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + rho * (xr - centroid))
                                       : Eigen::VectorXd(centroid + rho * (pts[n] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[n])) {
      pts[n] = xc;
      vals[n] = fc;
      continue;
    }
    for (Eigen::Index i = 1; i <= n; ++i) {
      pts[i] = pts[0] + sigma * (pts[i] - pts[0]);
      vals[i] = eval(pts[i]);
    }
  }
  const auto best = std::min_element(vals.begin(), vals.end()) - vals.begin();
  res.x = pts[best];
  res.value = vals[best];
  return res;
}

namespace {

// Seed candidates in the original coordinates.
std::vector<Eigen::VectorXd> seed_points(const Transform& tr, const OptimizerConfig& cfg) {
  const Eigen::Index n = tr.dim();
  std::vector<Eigen::VectorXd> unit;
  if (n <= 2) {
    const int g = std::max(1, cfg.grid);
    std::vector<double> axis(g);
    for (int i = 0; i < g; ++i) axis[i] = g == 1 ? 0.5 : static_cast<double>(i) / (g - 1);
    if (n == 1) {
      for (double a : axis) unit.push_back(Eigen::VectorXd::Constant(1, a));
    } else if (n == 2) {
      for (double a : axis) {
        for (double b : axis) unit.push_back(Eigen::Vector2d(a, b));
      }
    }
  } else {
    for (int i = 1; i <= cfg.sample_points; ++i) unit.push_back(halton_point(static_cast<std::uint64_t>(i), n));
  }

  std::vector<Eigen::VectorXd> out;
  out.reserve(unit.size());
  for (const auto& u : unit) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Bound& b = tr.bounds()[i];
      x(i) = b.seed_lo + u(i) * (b.seed_hi - b.seed_lo);
    }
    for (const auto& s : tr.simplices()) {
      // stick breaking keeps the seeds inside the simplex
      double remaining = 1.0;
      for (Eigen::Index i = s.start; i < s.start + s.size; ++i) {
        const double share = std::clamp(u(i), 0.02, 0.98);
        x(i) = remaining * share;
        remaining -= x(i);
      }
    }
    out.push_back(tr.clamp(x));
  }
  return out;
}

OptimResult refine_unbounded(const Objective& g, const Eigen::VectorXd& z0, const OptimizerConfig& cfg) {
  Eigen::VectorXd step = (0.25 + 0.05 * z0.array().abs()).matrix();
  OptimResult run = nelder_mead(g, z0, step, cfg);
  int iterations = run.iterations;
  int evaluations = run.evaluations;
  for (int r = 0; r < cfg.restarts; ++r) {
    step = (1e-2 + 1e-3 * run.x.array().abs()).matrix();
    OptimResult again = nelder_mead(g, run.x, step, cfg);
    evaluations += again.evaluations;
    iterations += again.iterations;
    const bool improved = again.value < run.value;
    if (again.value <= run.value) run = std::move(again);
    if (!improved) break;
  }
  run.iterations = iterations;
  run.evaluations = evaluations;
  return run;
}

}  // namespace

OptimResult refine(const Objective& f, const Transform& transform, const Eigen::VectorXd& x0,
                   const OptimizerConfig& cfg) {
  auto g = [&](const Eigen::VectorXd& z) { return f(transform.from_unbounded(z)); };
  OptimResult run = refine_unbounded(g, transform.to_unbounded(x0), cfg);
  run.x = transform.from_unbounded(run.x);
  return run;
}

OptimResult minimize(const Objective& f, const Transform& transform, const OptimizerConfig& cfg,
                     const std::vector<Eigen::VectorXd>& extra_starts) {
  const Eigen::Index n = transform.dim();
  int evaluations = 0;
  auto g = [&](const Eigen::VectorXd& z) { return f(transform.from_unbounded(z)); };

  std::vector<std::pair<double, Eigen::VectorXd>> seeds;
  auto add_seed = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd z = transform.to_unbounded(x);
    ++evaluations;
    double v = g(z);
    if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
    seeds.emplace_back(v, z);
  };
  for (const auto& x : extra_starts) add_seed(x);
  for (const auto& x : seed_points(transform, cfg)) add_seed(x);
  std::stable_sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  OptimResult best;
  best.x = transform.from_unbounded(seeds.front().second);
  best.value = seeds.front().first;
  const int starts = std::min<int>(std::max(1, cfg.starts), static_cast<int>(seeds.size()));
  std::vector<Eigen::VectorXd> used;
  for (std::size_t k = 0; k < seeds.size() && static_cast<int>(used.size()) < starts; ++k) {
    const Eigen::VectorXd& z0 = seeds[k].second;
    if (!std::isfinite(seeds[k].first)) break;
    const bool duplicate = std::any_of(used.begin(), used.end(), [&](const Eigen::VectorXd& u) {
      return (u - z0).cwiseAbs().maxCoeff() < 1e-6;
    });
    if (duplicate) continue;
    used.push_back(z0);

    OptimResult run = refine_unbounded(g, z0, cfg);
    evaluations += run.evaluations;
    if (run.value <= best.value) {
      best.x = transform.from_unbounded(run.x);
      best.value = run.value;
      best.converged = run.converged;
      best.iterations = run.iterations;
    }
  }
  if (n == 0) best.converged = true;
  best.evaluations = evaluations;
  return best;
}

}  // namespace graphsupou
