#include "graphsupou/network.hpp"

#include "graphsupou/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace graphsupou {

namespace {

void validate_adjacency(const Eigen::MatrixXd& A, bool directed) {
  if (A.rows() != A.cols()) {
    throw std::invalid_argument("adjacency matrix must be square, got " + std::to_string(A.rows()) + "x" +
                                std::to_string(A.cols()));
  }
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      const double a = A(i, j);
      if (a != 0.0 && a != 1.0) {
        throw std::invalid_argument("adjacency entries must be 0 or 1");
      }
      if (i == j && a != 0.0) {
        throw std::invalid_argument("adjacency diagonal must be zero (self-loop at node " + std::to_string(i + 1) +
                                    ")");
      }
      if (!directed && a != A(j, i)) {
        throw std::invalid_argument("undirected adjacency must be symmetric");
      }
    }
  }
}

Eigen::VectorXd in_degrees(const Eigen::MatrixXd& A) {
  Eigen::VectorXd n = A.colwise().sum().transpose();
  return n.cwiseMax(1.0);
}

}  // namespace

Eigen::MatrixXd normalize_adjacency(const Eigen::MatrixXd& A, bool directed) {
  validate_adjacency(A, directed);
  const Eigen::VectorXd n = in_degrees(A);
  return A * n.cwiseInverse().asDiagonal();
}

Network Network::from_adjacency(const Eigen::MatrixXd& A, bool directed) {
  validate_adjacency(A, directed);
  Network net;
  net.directed_ = directed;
  net.adjacency_ = A;
  net.finish();
  return net;
}

Network Network::from_edges(int nodes, const std::vector<Edge>& edges, bool directed) {
  if (nodes < 1) throw std::invalid_argument("network needs at least one node");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nodes, nodes);
  for (const auto& e : edges) {
    if (e.from < 0 || e.to < 0 || e.from >= nodes || e.to >= nodes) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.from == e.to) {
      throw std::invalid_argument("self-loop at node " + std::to_string(e.from + 1));
    }
    A(e.from, e.to) = 1.0;
    if (!directed) A(e.to, e.from) = 1.0;
  }
  return from_adjacency(A, directed);
}

void Network::finish() {
  degrees_ = in_degrees(adjacency_);
  abar_ = adjacency_ * degrees_.cwiseInverse().asDiagonal();
  const Eigen::Index d = abar_.rows();
  if (!directed_) {
    // Abar = A D is similar to the symmetric D^{1/2} A D^{1/2}.
    const Eigen::VectorXd s = degrees_.cwiseInverse().cwiseSqrt();
    const Eigen::MatrixXd sym = s.asDiagonal() * adjacency_ * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    spectrum_ = es.eigenvalues().cast<std::complex<double>>();
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(abar_, false);
    spectrum_ = es.eigenvalues();
  }
  a_star_ = d ? spectrum_.real().maxCoeff() : 0.0;
  a_min_ = d ? spectrum_.real().minCoeff() : 0.0;
}

int Network::edge_count() const {
  const double total = adjacency_.sum();
  return static_cast<int>(directed_ ? total : total / 2.0);
}

int Network::isolated_count() const {
  int count = 0;
  for (Eigen::Index i = 0; i < adjacency_.rows(); ++i) {
    if (adjacency_.row(i).sum() == 0.0 && adjacency_.col(i).sum() == 0.0) ++count;
  }
  return count;
}

bool Network::connected() const {
  const int d = size();
  if (d == 0) return true;
  std::vector<bool> seen(d, false);
  std::queue<int> todo;
  todo.push(0);
  seen[0] = true;
  int reached = 1;
  while (!todo.empty()) {
    const int i = todo.front();
    todo.pop();
    for (int j = 0; j < d; ++j) {
      if (!seen[j] && (adjacency_(i, j) != 0.0 || adjacency_(j, i) != 0.0)) {
        seen[j] = true;
        ++reached;
        todo.push(j);
      }
    }
  }
  return reached == d;
}

Network parse_edge_list(std::istream& in, bool directed, int nodes) {
  std::vector<Edge> edges;
  int max_id = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long a = 0;
    long b = 0;
    if (!(fields >> a)) {
      std::string rest;
      fields.clear();
      if (fields >> rest) throw ConfigError("edge list line " + std::to_string(line_no) + ": expected node ids");
      continue;
    }
    std::string extra;
    if (!(fields >> b) || (fields >> extra)) {
      throw ConfigError("edge list line " + std::to_string(line_no) + ": expected exactly two node ids");
    }
    if (a < 1 || b < 1) throw ConfigError("edge list line " + std::to_string(line_no) + ": node ids are 1-based");
    if (a == b) throw ConfigError("edge list line " + std::to_string(line_no) + ": self-loop");
    max_id = std::max<int>(max_id, static_cast<int>(std::max(a, b)));
    edges.push_back({static_cast<int>(a - 1), static_cast<int>(b - 1)});
  }
  if (nodes == 0) nodes = max_id;
  if (nodes < max_id) throw ConfigError("edge list references node " + std::to_string(max_id) + " beyond node count");
  if (nodes < 1) throw ConfigError("edge list defines no nodes");
  return Network::from_edges(nodes, edges, directed);
}

Network read_edge_list(const std::filesystem::path& path, bool directed, int nodes) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open network file " + path.string());
  return parse_edge_list(in, directed, nodes);
}

std::string summary_report(const Network& net) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "nodes = " << net.size() << '\n';
  out << "edges = " << net.edge_count() << '\n';
  out << "directed = " << (net.directed() ? "true" : "false") << '\n';
  out << "connected = " << (net.connected() ? "true" : "false") << '\n';
  out << "isolated_nodes = " << net.isolated_count() << '\n';
  out << "a_star = " << net.a_star() << '\n';
  out << "a_min = " << net.a_min() << '\n';
  out << "degrees =";
  for (Eigen::Index i = 0; i < net.degrees().size(); ++i) out << (i ? "," : " ") << net.degrees()(i);
  out << '\n';
  std::vector<double> eig(net.spectrum().size());
  for (Eigen::Index i = 0; i < net.spectrum().size(); ++i) eig[i] = net.spectrum()(i).real();
  std::sort(eig.rbegin(), eig.rend());
  out << "spectrum_real =";
  for (std::size_t i = 0; i < eig.size(); ++i) out << (i ? "," : " ") << eig[i];
  out << '\n';
  return out.str();
}

bool DriftParams::valid() const {
  return std::isfinite(theta1) && std::isfinite(theta2) && theta2 > std::abs(theta1);
}

Eigen::MatrixXd drift_Q(const DriftParams& p, const Network& net) {
  if (!p.valid()) {
    throw std::invalid_argument("drift parameters violate theta2 > |theta1|");
  }
  const int d = net.size();
  return -(p.theta2 * Eigen::MatrixXd::Identity(d, d) + p.theta1 * net.abar().transpose());
}

Eigen::MatrixXd drift_K(double c, const Network& net) {
  if (!(std::abs(c) < 1.0)) throw std::invalid_argument("network ratio c must satisfy |c| < 1");
  const int d = net.size();
  return -Eigen::MatrixXd::Identity(d, d) - c * net.abar().transpose();
}

StabilityReport check_stability(const DriftParams& p, const Network& net) {
  StabilityReport report;
  report.gershgorin_margin = p.theta2 - std::abs(p.theta1);
  const int d = net.size();
  const Eigen::MatrixXd Q = -(p.theta2 * Eigen::MatrixXd::Identity(d, d) + p.theta1 * net.abar().transpose());
  if (!Q.allFinite() || d == 0) {
    report.max_real_eig = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(Q, false);
  report.max_real_eig = es.eigenvalues().real().maxCoeff();
  report.stable = report.max_real_eig < 0.0;
  return report;
}

}  // namespace graphsupou
