#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace graphsupou {

enum class Family { gamma, sum_exp, dirac };

std::string family_name(Family f);
Family parse_family(const std::string& name);

// theta2 ~ Gamma(alpha, 1)
struct GammaLaw {
  double alpha = 2.0;
};

struct ExpAtom {
  double weight = 1.0;
  double rate = 1.0;
};

// pi(d theta2) = (1/wbar) sum_i w_i e^{-theta2} delta_{lambda_i}(d theta2),
// wbar = sum_i w_i e^{-lambda_i}, finitely many atoms.
struct SumExpLaw {
  std::vector<ExpAtom> atoms;
};

// pi = delta_lambda; recovers the graph OU process.
struct DiracLaw {
  double rate = 1.0;
};

/// Law of the randomised rate theta2. Construction validates positivity; a
/// Gamma shape in (0, 1] is representable (so that well-definedness can be
/// reported) but every moment computation rejects it.
class MixingMeasure {
 public:
  using Law = std::variant<GammaLaw, SumExpLaw, DiracLaw>;

  static MixingMeasure gamma(double alpha);
  // Weights must sum to one within 1e-12 unless `renormalise` is set.
  static MixingMeasure sum_exp(std::vector<ExpAtom> atoms, bool renormalise = false);
  static MixingMeasure dirac(double rate);

  const Law& law() const { return law_; }
  Family family() const;
  std::string describe() const;

  // Probability mass of each SumExp atom, w_i e^{-lambda_i} / wbar. Empty for
  // other families.
  const std::vector<double>& atom_probabilities() const { return probs_; }

  // Integral of 1/theta2; +inf when it diverges (Gamma alpha <= 1).
  double inverse_moment() const;
  // Integral of (1/theta2) e^{-theta2 s}, Re s >= 0.
  std::complex<double> inverse_laplace(std::complex<double> s) const;
  // Integral of e^{-theta2 s}, s >= 0.
  double laplace(double s) const;
  // Integral of theta2 e^{-theta2 s}, s >= 0.
  double theta_laplace(double s) const;
  double mean() const;
  // Lower q-quantile of theta2.
  double quantile(double q) const;

 private:
  explicit MixingMeasure(Law law);
  void require_finite_inverse_moment() const;

  Law law_;
  std::vector<double> probs_;
};

}  // namespace graphsupou
