#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <vector>

namespace graphsupou {

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Feasible set of one coordinate, handled through a smooth bijection with
/// the real line: logistic for (lo, hi), softplus for (lo, inf), identity
/// for free coordinates. [seed_lo, seed_hi] is the range searched by the
/// initial grid.
struct Bound {
  enum class Kind { interval, lower, free };
  Kind kind = Kind::free;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double seed_lo = -1.0;
  double seed_hi = 1.0;

  static Bound interval(double lo, double hi);
  static Bound interval(double lo, double hi, double seed_lo, double seed_hi);
  static Bound lower(double lo, double seed_lo, double seed_hi);
  static Bound free(double seed_lo, double seed_hi);

  double to_unbounded(double x) const;
  double from_unbounded(double z) const;
};

/// Coordinates [start, start + size) hold the first `size` weights of a
/// probability vector whose last weight is 1 minus their sum; they map to the
/// real line through an additive-logistic (softmax) transform.
struct SimplexBlock {
  Eigen::Index start = 0;
  Eigen::Index size = 0;
};

class Transform {
 public:
  explicit Transform(std::vector<Bound> bounds, std::vector<SimplexBlock> simplices = {});

  Eigen::Index dim() const { return static_cast<Eigen::Index>(bounds_.size()); }
  const std::vector<Bound>& bounds() const { return bounds_; }
  const std::vector<SimplexBlock>& simplices() const { return simplices_; }
  Eigen::VectorXd to_unbounded(const Eigen::VectorXd& x) const;
  Eigen::VectorXd from_unbounded(const Eigen::VectorXd& z) const;
  // Moves x strictly inside the feasible set.
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;

 private:
  bool in_simplex(Eigen::Index i) const;
  std::vector<Bound> bounds_;
  std::vector<SimplexBlock> simplices_;
};

struct OptimizerConfig {
  int grid = 40;              // points per axis when dim <= 2
  int sample_points = 1600;   // Halton points when dim > 2
  int starts = 3;             // simplex runs from the best seeds
  int max_iterations = 20000; // per simplex run
  double xtol = 1e-10;        // simplex diameter, unbounded coordinates
  double ftol = 1e-20;        // spread of objective values
  int restarts = 2;           // fresh simplex around the optimum after convergence
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

// Unconstrained Nelder-Mead with adaptive coefficients. Non-finite objective
// values are treated as +inf.
OptimResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                        const OptimizerConfig& cfg);

// Nelder-Mead from a single feasible start followed by cfg.restarts fresh
// simplices around the optimum.
OptimResult refine(const Objective& f, const Transform& transform, const Eigen::VectorXd& x0,
                   const OptimizerConfig& cfg);

// Seeds on a grid (or Halton sample) over the bounds' seed ranges plus any
// `extra_starts`, then refines the best seeds by Nelder-Mead in unbounded
// coordinates. The objective only ever sees feasible points.
OptimResult minimize(const Objective& f, const Transform& transform, const OptimizerConfig& cfg,
                     const std::vector<Eigen::VectorXd>& extra_starts = {});

// i-th point of the Halton sequence in [0, 1)^dim (bases: the first primes).
Eigen::VectorXd halton_point(std::uint64_t index, Eigen::Index dim);

}  // namespace graphsupou
