#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "noisyldpc/channel.hpp"
#include "noisyldpc/degree.hpp"

namespace noisyldpc::de {

/// Mean and variance of a Gaussian message density.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Message-density moments tracked through one density-evolution iteration.
/// Variable moments are indexed like dist.lambda().
struct GaussianState {
  double m_u = 0.0;
  double var_u = 0.0;
  std::vector<double> m_v;
  std::vector<double> var_v;
};

/// How the check-node target values are obtained before the 2-D moment
/// inversion: by sampling the tanh product (the default) or by quadrature
/// of the per-input expectations.
enum class CheckMethod { monte_carlo, quadrature };

struct DEParams {
  std::size_t mc_samples = 100000;
  int max_iterations = 2000;
  /// DE has converged once the check-output mean reaches this value.
  double convergence_mean = 50.0;
  CheckMethod method = CheckMethod::monte_carlo;
  std::uint64_t seed = 1;
};

class DEError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// E[tanh(X / 2)] and E[tanh^2(X / 2)] for X ~ N(m, var).
double f_mean(double m, double var);
double g_mean(double m, double var);

/// 1 - f and 1 - g evaluated without cancellation; these stay accurate when
/// the density is far from the origin.
double one_minus_f(double m, double var);
double one_minus_g(double m, double var);

/// Solves f(m, v) = 1 - one_minus_f_target and g(m, v) = 1 - one_minus_g_target
/// for the Gaussian (m, v). Throws DEError with diagnostics when the Newton
/// iteration does not converge.
Moments invert_fg(double one_minus_f_target, double one_minus_g_target, std::optional<Moments> guess = {});

/// Variable-node output moments per lambda term:
/// m = m0 + (i - 1) m_u, var = var0 + (i - 1)(var_u + sigma2_d).
std::vector<Moments> variable_step(const GaussianState& state, const DegreeDistribution& dist,
                                   const NoiseModel& noise);

/// Draws for the Monte-Carlo check step. The same standard-normal and
/// uniform draws are reused every iteration (common random numbers), which
/// keeps the recursion a deterministic map for a given seed.
class CheckSampler {
 public:
  CheckSampler(std::size_t samples, int max_inputs, std::uint64_t seed);

  std::size_t samples() const { return samples_; }
  int max_inputs() const { return max_inputs_; }
  double normal(std::size_t s, int k) const { return normals_[s * max_inputs_ + k]; }
  double uniform(std::size_t s, int k) const { return uniforms_[s * max_inputs_ + k]; }

 private:
  std::size_t samples_;
  int max_inputs_;
  std::vector<double> normals_;
  std::vector<double> uniforms_;
};

/// Check-node moments from variable moments: per check degree i solve the
/// (f, g) matching for inputs drawn from the lambda-weighted Gaussian mixture
/// N(m_v, var_v + sigma2_d), then combine degrees as a rho-weighted mixture.
/// A check degree whose target has saturated yields an infinite mean.
Moments check_step(const std::vector<Moments>& variable, const DegreeDistribution& dist, const NoiseModel& noise,
                   const CheckSampler* sampler, std::optional<Moments> guess = {});

/// P(X < 0) for X ~ N(m, var).
double error_probability(double m, double var);

struct DEResult {
  bool converged = false;
  int iterations = 0;
  GaussianState state;
  /// Check-output moments after each iteration.
  std::vector<Moments> trace;
};

DEResult run(const DegreeDistribution& dist, const NoiseModel& noise, const DEParams& params);

/// Convenience for a single SNR point at the distribution's design rate.
bool converges(const DegreeDistribution& dist, double snr_db, double sigma2_d, const DEParams& params);

struct ThresholdResult {
  double snr_db = 0.0;
  double sigma_n = 0.0;
  int de_runs = 0;
};

/// Bisection on Eb/N0 over [-2, 10] dB: DE converges at the returned SNR and
/// fails tol_db below it.
ThresholdResult threshold(const DegreeDistribution& dist, double sigma2_d, double tol_db, const DEParams& params);

}  // namespace noisyldpc::de
