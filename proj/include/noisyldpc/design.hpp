#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "noisyldpc/cache.hpp"
#include "noisyldpc/degree.hpp"
#include "noisyldpc/exit.hpp"

namespace noisyldpc::design {

struct DesignSpec {
  /// Check degrees are dc and dc + 1, mixed as alpha and 1 - alpha.
  int dc = 5;
  int dv_max = 4;
  /// Candidate variable degrees; empty means 2..dv_max.
  std::vector<int> variable_degrees;
  double rate = 0.5;
  double sigma2_d = 0.0;
  double delta_db = 0.05;
  int alpha_grid_size = 100;
  double margin = 1e-3;
  /// Defaults to the DE threshold of the regular (3, dc) code plus 1 dB.
  std::optional<double> initial_snr_db;
  std::vector<double> grid = exit::default_grid();
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct TraceEntry {
  double snr_db = 0.0;
  bool feasible = false;
  double alpha = 0.0;
  double slack = 0.0;
  EdgePolynomial lambda;
};

struct DesignResult {
  DegreeDistribution dist;
  double snr_th_db = 0.0;
  double alpha = 0.0;
  /// Minimum tunnel slack beyond the margin at snr_th_db.
  double slack = 0.0;
  std::vector<TraceEntry> trace;
};

struct LambdaFit {
  EdgePolynomial lambda;
  double slack = 0.0;
};

/// Raised when the LP itself misbehaves (unbounded), as opposed to an
/// infeasible design point.
class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Max-min-slack LP over lambda for the given check polynomial and curves.
/// Returns nullopt when the best slack is negative.
std::optional<LambdaFit> feasible_lambda(const EdgePolynomial& rho, const std::vector<exit::ExitCurve>& vcurves,
                                         const exit::ExitCurve& ccurve, double rate, double margin);

/// SNR descent with an alpha sweep at each step; returns the last feasible code.
DesignResult design_code(const DesignSpec& spec, CurveCache* cache = nullptr);

}  // namespace noisyldpc::design
