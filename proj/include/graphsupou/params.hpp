#pragma once

#include "graphsupou/mixing.hpp"
#include "graphsupou/model.hpp"
#include "graphsupou/network.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace graphsupou {

// How sigma2_L enters the parameter vector.
enum class SigmaStructure { scalar, diagonal, full };

std::string sigma_structure_name(SigmaStructure s);
SigmaStructure parse_sigma_structure(const std::string& name);

/// Layout of the full parameter vector
///   xi = (theta, c, mu_L, sigma2_L)
/// where theta is alpha (Gamma), lambda (Dirac) or
/// (w_1..w_{K-1}, lambda_1..lambda_K) (SumExp, w_K = 1 - sum of the rest), and
/// sigma2_L is s (scalar s I), its diagonal, or vech of the full matrix.
struct ParamLayout {
  Family family = Family::gamma;
  int atoms = 1;
  int d = 1;
  SigmaStructure sigma = SigmaStructure::diagonal;

  Eigen::Index family_dim() const;
  Eigen::Index sigma_dim() const;
  Eigen::Index dim() const;
  Eigen::Index c_index() const { return family_dim(); }
  Eigen::Index mu_offset() const { return family_dim() + 1; }
  Eigen::Index sigma_offset() const { return mu_offset() + d; }
  std::vector<std::string> names() const;
};

struct ModelParams {
  MixingMeasure pi;
  double c = 0.0;
  LevyMomentSpec levy;
};

// Projects sigma2_L onto the layout's structure (mean diagonal for scalar,
// diagonal for diagonal).
Eigen::VectorXd pack(const ParamLayout& layout, const ModelParams& params);
// Throws std::invalid_argument outside the admissible region.
ModelParams unpack(const ParamLayout& layout, const Eigen::VectorXd& xi);
bool admissible(const ParamLayout& layout, const Eigen::VectorXd& xi);

// Number of moment conditions q = d + (m + 1) d (d + 1) / 2.
Eigen::Index moment_count(Eigen::Index d, Eigen::Index m);

/// mu(xi) = E(X_0) and D_i(xi) = E(X_0 X_{i Delta}^T), i = 0..m.
struct MomentVector {
  Eigen::VectorXd mean;
  std::vector<Eigen::MatrixXd> D;

  // (mu, vech D_0, ..., vech D_m)
  Eigen::VectorXd stacked() const;
};

MomentVector moment_vector(const ModelParams& params, const Network& net, Eigen::Index m, double delta);
MomentVector moment_vector(const ParamLayout& layout, const Eigen::VectorXd& xi, const Network& net, Eigen::Index m,
                           double delta);

}  // namespace graphsupou
