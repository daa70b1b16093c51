#include "graphsupou/params.hpp"

#include "graphsupou/linops.hpp"

#include <cmath>
#include <stdexcept>

namespace graphsupou {

std::string sigma_structure_name(SigmaStructure s) {
  switch (s) {
    case SigmaStructure::scalar:
      return "scalar";
    case SigmaStructure::diagonal:
      return "diagonal";
    case SigmaStructure::full:
      return "full";
  }
  return "unknown";
}

SigmaStructure parse_sigma_structure(const std::string& name) {
  if (name == "scalar") return SigmaStructure::scalar;
  if (name == "diagonal" || name == "diag") return SigmaStructure::diagonal;
  if (name == "full") return SigmaStructure::full;
  throw std::invalid_argument("unknown sigma2_L structure '" + name + "'");
}

Eigen::Index ParamLayout::family_dim() const {
  switch (family) {
    case Family::gamma:
    case Family::dirac:
      return 1;
    case Family::sum_exp:
      return 2 * atoms - 1;
  }
  return 0;
}

Eigen::Index ParamLayout::sigma_dim() const {
  switch (sigma) {
    case SigmaStructure::scalar:
      return 1;
    case SigmaStructure::diagonal:
      return d;
    case SigmaStructure::full:
      return vech_size(d);
  }
  return 0;
}

Eigen::Index ParamLayout::dim() const { return family_dim() + 1 + d + sigma_dim(); }

std::vector<std::string> ParamLayout::names() const {
  std::vector<std::string> out;
  switch (family) {
    case Family::gamma:
      out.push_back("alpha");
      break;
    case Family::dirac:
      out.push_back("lambda");
      break;
    case Family::sum_exp:
      for (int i = 1; i < atoms; ++i) out.push_back("w" + std::to_string(i));
      for (int i = 1; i <= atoms; ++i) out.push_back("lambda" + std::to_string(i));
      break;
  }
  out.push_back("c");
  for (int i = 1; i <= d; ++i) out.push_back("mu_L" + std::to_string(i));
  switch (sigma) {
    case SigmaStructure::scalar:
      out.push_back("sigma2_L");
      break;
    case SigmaStructure::diagonal:
      for (int i = 1; i <= d; ++i) out.push_back("sigma2_L" + std::to_string(i) + std::to_string(i));
      break;
    case SigmaStructure::full:
      for (int j = 1; j <= d; ++j) {
        for (int i = j; i <= d; ++i) out.push_back("sigma2_L" + std::to_string(i) + "_" + std::to_string(j));
      }
      break;
  }
  return out;
}

Eigen::VectorXd pack(const ParamLayout& layout, const ModelParams& params) {
  if (params.pi.family() != layout.family) throw std::invalid_argument("pack: mixing family does not match layout");
  Eigen::VectorXd xi(layout.dim());
  if (const auto* g = std::get_if<GammaLaw>(&params.pi.law())) {
    xi(0) = g->alpha;
  } else if (const auto* dl = std::get_if<DiracLaw>(&params.pi.law())) {
    xi(0) = dl->rate;
  } else {
    const auto& law = std::get<SumExpLaw>(params.pi.law());
    if (static_cast<int>(law.atoms.size()) != layout.atoms) throw std::invalid_argument("pack: atom count mismatch");
    for (int i = 0; i + 1 < layout.atoms; ++i) xi(i) = law.atoms[i].weight;
    for (int i = 0; i < layout.atoms; ++i) xi(layout.atoms - 1 + i) = law.atoms[i].rate;
  }
  xi(layout.c_index()) = params.c;
  xi.segment(layout.mu_offset(), layout.d) = params.levy.mu_L;
  const auto& s2 = params.levy.sigma2_L;
  switch (layout.sigma) {
    case SigmaStructure::scalar:
      xi(layout.sigma_offset()) = s2.diagonal().mean();
      break;
    case SigmaStructure::diagonal:
      xi.segment(layout.sigma_offset(), layout.d) = s2.diagonal();
      break;
    case SigmaStructure::full:
      xi.segment(layout.sigma_offset(), layout.sigma_dim()) = vech(s2);
      break;
  }
  return xi;
}

namespace {

MixingMeasure unpack_mixing(const ParamLayout& layout, const Eigen::VectorXd& xi) {
  switch (layout.family) {
    case Family::gamma:
      if (!(xi(0) > 1.0)) throw std::invalid_argument("alpha must exceed 1");
      return MixingMeasure::gamma(xi(0));
    case Family::dirac:
      return MixingMeasure::dirac(xi(0));
    case Family::sum_exp: {
      std::vector<ExpAtom> atoms(layout.atoms);
      double rest = 1.0;
      for (int i = 0; i + 1 < layout.atoms; ++i) {
        atoms[i].weight = xi(i);
        rest -= xi(i);
      }
      if (rest < -1e-12) throw std::invalid_argument("SumExp weights exceed 1");
      atoms.back().weight = std::max(rest, 0.0);
      for (int i = 0; i < layout.atoms; ++i) atoms[i].rate = xi(layout.atoms - 1 + i);
      return MixingMeasure::sum_exp(atoms, true);
    }
  }
  throw std::invalid_argument("unknown family");
}

}  // namespace

ModelParams unpack(const ParamLayout& layout, const Eigen::VectorXd& xi) {
  if (xi.size() != layout.dim()) throw std::invalid_argument("parameter vector has the wrong length");
  if (!xi.allFinite()) throw std::invalid_argument("parameter vector is not finite");
  const double c = xi(layout.c_index());
  if (!(std::abs(c) < 1.0)) throw std::invalid_argument("|c| must be < 1");
  LevyMomentSpec levy;
  levy.mu_L = xi.segment(layout.mu_offset(), layout.d);
  const auto s = xi.segment(layout.sigma_offset(), layout.sigma_dim());
  switch (layout.sigma) {
    case SigmaStructure::scalar:
      levy.sigma2_L = s(0) * Eigen::MatrixXd::Identity(layout.d, layout.d);
      break;
    case SigmaStructure::diagonal:
      levy.sigma2_L = s.asDiagonal();
      break;
    case SigmaStructure::full:
      levy.sigma2_L = unvech(s, layout.d);
      break;
  }
  levy.validate(layout.d);
  return {unpack_mixing(layout, xi), c, std::move(levy)};
}

bool admissible(const ParamLayout& layout, const Eigen::VectorXd& xi) {
  try {
    unpack(layout, xi);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

Eigen::Index moment_count(Eigen::Index d, Eigen::Index m) { return d + (m + 1) * vech_size(d); }

Eigen::VectorXd MomentVector::stacked() const {
  const Eigen::Index d = mean.size();
  Eigen::VectorXd out(moment_count(d, static_cast<Eigen::Index>(D.size()) - 1));
  out.head(d) = mean;
  Eigen::Index offset = d;
  for (const auto& Di : D) {
    out.segment(offset, vech_size(d)) = vech(Di);
    offset += vech_size(d);
  }
  return out;
}

MomentVector moment_vector(const ModelParams& params, const Network& net, Eigen::Index m, double delta) {
  if (m < 0) throw std::invalid_argument("moment_vector: max lag must be >= 0");
  const GraphSupOU model(net, params.pi, params.c);
  MomentVector mv;
  mv.mean = model.mean(params.levy);
  const Eigen::MatrixXd outer = mv.mean * mv.mean.transpose();
  const Eigen::MatrixXd P = model.lyapunov_solution(params.levy.sigma2_L);
  mv.D.reserve(m + 1);
  for (Eigen::Index i = 0; i <= m; ++i) {
    // autocov(i) = cov(X_i, X_0); E(X_0 X_i^T) needs its transpose.
    const Eigen::MatrixXd cov = i == 0 ? Eigen::MatrixXd(model.inverse_moment() * P)
                                       : Eigen::MatrixXd(model.mixture_kernel(static_cast<double>(i) * delta) * P);
    mv.D.push_back(cov.transpose() + outer);
  }
  return mv;
}

MomentVector moment_vector(const ParamLayout& layout, const Eigen::VectorXd& xi, const Network& net, Eigen::Index m,
                           double delta) {
  return moment_vector(unpack(layout, xi), net, m, delta);
}

}  // namespace graphsupou
