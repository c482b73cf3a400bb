#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace noisyldpc {

/// One (node degree, edge fraction) term of an edge-perspective polynomial.
/// Degree i contributes fraction * x^(i-1).
struct DegreeTerm {
  int degree = 0;
  double fraction = 0.0;

  bool operator==(const DegreeTerm&) const = default;
};

using EdgePolynomial = std::vector<DegreeTerm>;

/// Edge-perspective degree distribution pair (lambda for variable nodes,
/// rho for check nodes). Terms are kept sorted by degree with duplicates
/// merged; construction does not validate, call validate() for that.
class DegreeDistribution {
 public:
  static constexpr double kNormTolerance = 1e-9;

  DegreeDistribution() = default;
  DegreeDistribution(EdgePolynomial lambda, EdgePolynomial rho);

  /// The (dv, dc) regular ensemble: lambda(x) = x^(dv-1), rho(x) = x^(dc-1).
  static DegreeDistribution regular(int dv, int dc);

  const EdgePolynomial& lambda() const { return lambda_; }
  const EdgePolynomial& rho() const { return rho_; }

  int dv_max() const;
  int dc_max() const;

  /// Copy with both sides rescaled to sum exactly to one.
  DegreeDistribution normalized() const;

  bool operator==(const DegreeDistribution&) const = default;

 private:
  EdgePolynomial lambda_;
  EdgePolynomial rho_;
};

/// Sorts by degree and merges repeated degrees.
EdgePolynomial canonical(EdgePolynomial poly);

/// Integral of the polynomial over [0, 1], i.e. sum of fraction / degree.
double integral(const EdgePolynomial& poly);

/// Design rate 1 - (int rho) / (int lambda). Throws std::invalid_argument
/// when the lambda integral vanishes.
double rate(const DegreeDistribution& dist);

/// rho(x) = alpha x^(dc-1) + (1 - alpha) x^dc, i.e. check node degrees dc
/// and dc + 1. Zero-weight terms are dropped.
EdgePolynomial two_term_check(int dc, double alpha);

/// Human-readable list of every violated invariant; empty when valid.
std::vector<std::string> validate(const DegreeDistribution& dist);

/// Fraction of *nodes* having each degree, derived from edge fractions.
EdgePolynomial node_perspective(const EdgePolynomial& poly);

void to_json(nlohmann::json& j, const DegreeDistribution& dist);
void from_json(const nlohmann::json& j, DegreeDistribution& dist);

std::string to_string(const EdgePolynomial& poly);

}  // namespace noisyldpc
