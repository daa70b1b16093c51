#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace graphsupou {

// Node pair, 0-based. For directed networks `from -> to` sets a(from, to) = 1.
struct Edge {
  int from = 0;
  int to = 0;
};

// Column-normalised adjacency Abar = A * diag(1/n_1, ..., 1/n_d) with
// n_j = max(1, column-j sum of A). Throws std::invalid_argument for a
// non-square matrix, a nonzero diagonal, entries other than 0/1, or an
// asymmetric matrix when `directed` is false.
Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& A, bool directed = false);

/// Known graph structure of the process. Immutable once built.
class Network {
 public:
  static Network from_adjacency(const Eigen::MatrixXd& A, bool directed = false);
  static Network from_edges(int nodes, const std::vector<Edge>& edges, bool directed = false);

  int size() const { return static_cast<int>(adjacency_.rows()); }
  bool directed() const { return directed_; }
  const Eigen::MatrixXd& adjacency() const { return adjacency_; }
  // n_i = max(1, in-degree of node i)
  const Eigen::VectorXd& degrees() const { return degrees_; }
  const Eigen::MatrixXd& abar() const { return abar_; }
  const Eigen::VectorXcd& spectrum() const { return spectrum_; }
  // Largest and smallest real part over the spectrum of Abar.
  double a_star() const { return a_star_; }
  double a_min() const { return a_min_; }
  int edge_count() const;
  int isolated_count() const;
  bool connected() const;

 private:
  Network() = default;
  void finish();

  bool directed_ = false;
  Eigen::MatrixXd adjacency_;
  Eigen::VectorXd degrees_;
  Eigen::MatrixXd abar_;
  Eigen::VectorXcd spectrum_;
  double a_star_ = 0.0;
  double a_min_ = 0.0;
};

// Edge-list text: one whitespace-separated pair of 1-based node ids per line,
// '#' starts a comment. `nodes` = 0 infers the node count from the largest id.
Network parse_edge_list(std::istream& in, bool directed = false, int nodes = 0);
Network read_edge_list(const std::filesystem::path& path, bool directed = false, int nodes = 0);

// key = value report of the graph and its spectrum.
std::string summary_report(const Network& net);

struct DriftParams {
  double theta1 = 0.0;  // network effect
  double theta2 = 1.0;  // momentum

  static DriftParams from_ratio(double c, double theta2) { return {c * theta2, theta2}; }
  double c() const { return theta1 / theta2; }
  // theta2 > |theta1|
  bool valid() const;
};

// Q(theta) = -(theta2 I + theta1 Abar^T); throws for invalid parameters.
Eigen::MatrixXd drift_Q(const DriftParams& p, const Network& net);
// K(c) = -I - c Abar^T; throws unless |c| < 1.
Eigen::MatrixXd drift_K(double c, const Network& net);

struct StabilityReport {
  bool stable = false;
  double gershgorin_margin = 0.0;
  double max_real_eig = 0.0;
};

// Never throws; reports the Gershgorin margin theta2 - |theta1| and the exact
// spectral abscissa of Q.
StabilityReport check_stability(const DriftParams& p, const Network& net);

}  // namespace graphsupou
