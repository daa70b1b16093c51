#include "graphsupou/mixing.hpp"

#include "graphsupou/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace graphsupou {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kWeightTolerance = 1e-12;

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::gamma:
      return "gamma";
    case Family::sum_exp:
      return "sumexp";
    case Family::dirac:
      return "dirac";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  if (name == "gamma") return Family::gamma;
  if (name == "dirac" || name == "ou") return Family::dirac;
  if (name.rfind("sumexp", 0) == 0) return Family::sum_exp;
  throw std::invalid_argument("unknown mixing family '" + name + "'");
}

MixingMeasure::MixingMeasure(Law law) : law_(std::move(law)) {}

MixingMeasure MixingMeasure::gamma(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("Gamma shape must be positive");
  return MixingMeasure(GammaLaw{alpha});
}

MixingMeasure MixingMeasure::dirac(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("Dirac rate must be positive");
  return MixingMeasure(DiracLaw{rate});
}

MixingMeasure MixingMeasure::sum_exp(std::vector<ExpAtom> atoms, bool renormalise) {
  if (atoms.empty()) throw std::invalid_argument("sum-of-exponentials law needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.rate > 0.0) || !std::isfinite(a.rate)) throw std::invalid_argument("atom rates must be positive");
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) throw std::invalid_argument("atom weights must be >= 0");
    total += a.weight;
  }
  if (!(total > 0.0)) throw std::invalid_argument("atom weights sum to zero");
  if (renormalise) {
    for (auto& a : atoms) a.weight /= total;
  } else if (std::abs(total - 1.0) > kWeightTolerance) {
    throw std::invalid_argument("atom weights must sum to 1");
  }
  MixingMeasure pi(SumExpLaw{atoms});
  double wbar = 0.0;
  for (const auto& a : atoms) wbar += a.weight * std::exp(-a.rate);
  if (!(wbar > 0.0)) throw std::invalid_argument("tilted atom weights underflow (rates too large)");
  pi.probs_.reserve(atoms.size());
  for (const auto& a : atoms) pi.probs_.push_back(a.weight * std::exp(-a.rate) / wbar);
  return pi;
}

Family MixingMeasure::family() const {
  return std::visit(overloaded{[](const GammaLaw&) { return Family::gamma; },
                               [](const SumExpLaw&) { return Family::sum_exp; },
                               [](const DiracLaw&) { return Family::dirac; }},
                    law_);
}

std::string MixingMeasure::describe() const {
  std::ostringstream out;
  out.precision(10);
  std::visit(overloaded{[&](const GammaLaw& g) { out << "gamma(alpha=" << g.alpha << ")"; },
                        [&](const SumExpLaw& s) {
                          out << "sumexp(";
                          for (std::size_t i = 0; i < s.atoms.size(); ++i) {
                            out << (i ? "; " : "") << "w=" << s.atoms[i].weight << ",lambda=" << s.atoms[i].rate;
                          }
                          out << ")";
                        },
                        [&](const DiracLaw& d) { out << "dirac(lambda=" << d.rate << ")"; }},
             law_);
  return out.str();
}

void MixingMeasure::require_finite_inverse_moment() const {
  if (const auto* g = std::get_if<GammaLaw>(&law_); g && !(g->alpha > 1.0)) {
    throw std::invalid_argument("Gamma mixing needs alpha > 1 for finite second-order structure");
  }
}

double MixingMeasure::inverse_moment() const {
  return std::visit(overloaded{[](const GammaLaw& g) {
                                 return g.alpha > 1.0 ? 1.0 / (g.alpha - 1.0)
                                                      : std::numeric_limits<double>::infinity();
                               },
                               [this](const SumExpLaw& s) {
                                 double v = 0.0;
                                 for (std::size_t i = 0; i < s.atoms.size(); ++i) v += probs_[i] / s.atoms[i].rate;
                                 return v;
                               },
                               [](const DiracLaw& d) { return 1.0 / d.rate; }},
                    law_);
}

std::complex<double> MixingMeasure::inverse_laplace(std::complex<double> s) const {
  require_finite_inverse_moment();
  return std::visit(overloaded{[s](const GammaLaw& g) {
                                 return std::pow(1.0 + s, 1.0 - g.alpha) / (g.alpha - 1.0);
                               },
                               [this, s](const SumExpLaw& law) {
                                 std::complex<double> v = 0.0;
                                 for (std::size_t i = 0; i < law.atoms.size(); ++i) {
                                   const double r = law.atoms[i].rate;
                                   v += probs_[i] / r * std::exp(-r * s);
                                 }
                                 return v;
                               },
                               [s](const DiracLaw& d) { return std::exp(-d.rate * s) / d.rate; }},
                    law_);
}

double MixingMeasure::laplace(double s) const {
  return std::visit(overloaded{[s](const GammaLaw& g) { return std::pow(1.0 + s, -g.alpha); },
                               [this, s](const SumExpLaw& law) {
                                 double v = 0.0;
                                 for (std::size_t i = 0; i < law.atoms.size(); ++i) {
                                   v += probs_[i] * std::exp(-law.atoms[i].rate * s);
                                 }
                                 return v;
                               },
                               [s](const DiracLaw& d) { return std::exp(-d.rate * s); }},
                    law_);
}

double MixingMeasure::theta_laplace(double s) const {
  return std::visit(overloaded{[s](const GammaLaw& g) { return g.alpha * std::pow(1.0 + s, -(g.alpha + 1.0)); },
                               [this, s](const SumExpLaw& law) {
                                 double v = 0.0;
                                 for (std::size_t i = 0; i < law.atoms.size(); ++i) {
                                   const double r = law.atoms[i].rate;
                                   v += probs_[i] * r * std::exp(-r * s);
                                 }
                                 return v;
                               },
                               [s](const DiracLaw& d) { return d.rate * std::exp(-d.rate * s); }},
                    law_);
}

double MixingMeasure::mean() const { return theta_laplace(0.0); }

double MixingMeasure::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  return std::visit(overloaded{[q](const GammaLaw& g) { return boost::math::gamma_p_inv(g.alpha, q); },
                               [this, q](const SumExpLaw& law) {
                                 std::vector<std::size_t> order(law.atoms.size());
                                 std::iota(order.begin(), order.end(), 0);
                                 std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                                   return law.atoms[a].rate < law.atoms[b].rate;
                                 });
                                 double cum = 0.0;
                                 for (std::size_t i : order) {
                                   cum += probs_[i];
                                   if (probs_[i] > 0.0 && cum >= q) return law.atoms[i].rate;
                                 }
                                 return law.atoms[order.back()].rate;
                               },
                               [](const DiracLaw& d) { return d.rate; }},
                    law_);
}

}  // namespace graphsupou
