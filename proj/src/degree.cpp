#include "noisyldpc/degree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace noisyldpc {

EdgePolynomial canonical(EdgePolynomial poly) {
  std::sort(poly.begin(), poly.end(),
            [](const DegreeTerm& a, const DegreeTerm& b) { return a.degree < b.degree; });
  EdgePolynomial out;
  for (const auto& t : poly) {
    if (!out.empty() && out.back().degree == t.degree) {
      out.back().fraction += t.fraction;
    } else {
      out.push_back(t);
    }
  }
  return out;
}

DegreeDistribution::DegreeDistribution(EdgePolynomial lambda, EdgePolynomial rho)
    : lambda_(canonical(std::move(lambda))), rho_(canonical(std::move(rho))) {}

DegreeDistribution DegreeDistribution::regular(int dv, int dc) {
  return DegreeDistribution({{dv, 1.0}}, {{dc, 1.0}});
}

int DegreeDistribution::dv_max() const { return lambda_.empty() ? 0 : lambda_.back().degree; }

int DegreeDistribution::dc_max() const { return rho_.empty() ? 0 : rho_.back().degree; }

namespace {

EdgePolynomial renormalize(EdgePolynomial poly) {
  double sum = 0.0;
  for (const auto& t : poly) sum += t.fraction;
  if (sum <= 0.0) throw std::invalid_argument("cannot normalize an all-zero polynomial");
  for (auto& t : poly) t.fraction /= sum;
  return poly;
}

}  // namespace

DegreeDistribution DegreeDistribution::normalized() const {
  return DegreeDistribution(renormalize(lambda_), renormalize(rho_));
}

double integral(const EdgePolynomial& poly) {
  double s = 0.0;
  for (const auto& t : poly) s += t.fraction / t.degree;
  return s;
}

double rate(const DegreeDistribution& dist) {
  const double lam = integral(dist.lambda());
  if (!(lam > 0.0)) throw std::invalid_argument("degenerate degree distribution: lambda integral is zero");
  return 1.0 - integral(dist.rho()) / lam;
}

EdgePolynomial two_term_check(int dc, double alpha) {
  if (dc < 3) throw std::invalid_argument("two_term_check: dc must be at least 3");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("two_term_check: alpha outside [0, 1]");
  EdgePolynomial rho;
  if (alpha > 0.0) rho.push_back({dc, alpha});
  if (alpha < 1.0) rho.push_back({dc + 1, 1.0 - alpha});
  return rho;
}

std::vector<std::string> validate(const DegreeDistribution& dist) {
  std::vector<std::string> out;
  auto check_side = [&out](const EdgePolynomial& poly, const std::string& name) {
    if (poly.empty()) {
      out.push_back(name + " is empty");
      return;
    }
    double sum = 0.0;
    bool low_degree = false;
    bool negative = false;
    for (const auto& t : poly) {
      sum += t.fraction;
      low_degree = low_degree || t.degree < 2;
      negative = negative || !(t.fraction >= 0.0) || t.fraction > 1.0;
    }
    if (std::abs(sum - 1.0) > DegreeDistribution::kNormTolerance) out.push_back(name + " not normalized");
    if (low_degree) out.push_back(name + " degree below 2");
    if (negative) out.push_back(name + " fraction outside [0, 1]");
  };
  check_side(dist.lambda(), "lambda");
  check_side(dist.rho(), "rho");
  return out;
}

EdgePolynomial node_perspective(const EdgePolynomial& poly) {
  const double total = integral(poly);
  EdgePolynomial out;
  out.reserve(poly.size());
  for (const auto& t : poly) out.push_back({t.degree, total > 0.0 ? (t.fraction / t.degree) / total : 0.0});
  return out;
}

namespace {

nlohmann::json poly_to_json(const EdgePolynomial& poly) {
  auto arr = nlohmann::json::array();
  for (const auto& t : poly) arr.push_back({t.degree, t.fraction});
  return arr;
}

EdgePolynomial poly_from_json(const nlohmann::json& arr, const char* name) {
  if (!arr.is_array()) throw std::invalid_argument(std::string(name) + ": expected an array of [degree, fraction]");
  EdgePolynomial poly;
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() != 2)
      throw std::invalid_argument(std::string(name) + ": each entry must be [degree, fraction]");
    poly.push_back({item[0].get<int>(), item[1].get<double>()});
  }
  return poly;
}

}  // namespace

void to_json(nlohmann::json& j, const DegreeDistribution& dist) {
  j = nlohmann::json{{"lambda", poly_to_json(dist.lambda())}, {"rho", poly_to_json(dist.rho())}};
}

void from_json(const nlohmann::json& j, DegreeDistribution& dist) {
  if (!j.contains("lambda") || !j.contains("rho"))
    throw std::invalid_argument("degree distribution needs 'lambda' and 'rho'");
  dist = DegreeDistribution(poly_from_json(j.at("lambda"), "lambda"), poly_from_json(j.at("rho"), "rho"));
}

std::string to_string(const EdgePolynomial& poly) {
  std::ostringstream os;
  os.precision(4);
  bool first = true;
  for (const auto& t : poly) {
    if (!first) os << " + ";
    first = false;
    os << t.fraction << " x^" << t.degree - 1;
  }
  return os.str();
}

}  // namespace noisyldpc
