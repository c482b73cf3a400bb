#include "noisyldpc/de.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "gaussian.hpp"
#include "noisyldpc/decoder.hpp"
#include "noisyldpc/rng.hpp"

namespace noisyldpc::de {

namespace {

using detail::gaussian_expectation;

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1 - tanh(x/2) = 2 / (1 + e^x)
double one_minus_tanh_half(double x) {
  if (x > 0.0) {
    const double e = std::exp(-x);
    return 2.0 * e / (1.0 + e);
  }
  return 2.0 / (1.0 + std::exp(x));
}

// 1 - tanh^2(x/2) = sech^2(x/2)
double sech2_half(double x) {
  const double e = std::exp(-std::abs(x));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

struct FgEval {
  double omf;  // 1 - f
  double omg;  // 1 - g
  double c;    // E[t (1 - t^2)]
  double d;    // E[(1 - t^2)(1 - 3 t^2)]
};

FgEval evaluate(double m, double v) {
  FgEval r;
  r.omf = one_minus_f(m, v);
  r.omg = one_minus_g(m, v);
  r.c = gaussian_expectation(m, v, [](double x) { return std::tanh(0.5 * x) * sech2_half(x); });
  r.d = gaussian_expectation(m, v, [](double x) {
    const double t = std::tanh(0.5 * x);
    return sech2_half(x) * (1.0 - 3.0 * t * t);
  });
  return r;
}

// Consistent starting point: the m with 1 - f(m, 2m) = target.
Moments consistent_guess(double omf_target) {
  double lo = -12.0, hi = 8.0;  // log m
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double m = std::exp(mid);
    if (one_minus_f(m, 2.0 * m) > omf_target)
      lo = mid;
    else
      hi = mid;
  }
  const double m = std::exp(0.5 * (lo + hi));
  return {m, 2.0 * m};
}

}  // namespace

double one_minus_f(double m, double var) { return gaussian_expectation(m, var, one_minus_tanh_half); }

double one_minus_g(double m, double var) { return gaussian_expectation(m, var, sech2_half); }

double f_mean(double m, double var) {
  if (m < 0.0) return -f_mean(-m, var);
  return 1.0 - one_minus_f(m, var);
}

double g_mean(double m, double var) { return 1.0 - one_minus_g(std::abs(m), var); }

Moments invert_fg(double omf_target, double omg_target, std::optional<Moments> guess) {
  if (!(omf_target > 0.0 && omf_target < 1.0) || !(omg_target > 0.0 && omg_target <= 1.0)) {
    std::ostringstream os;
    os << "invert_fg: targets out of range (1-f=" << omf_target << ", 1-g=" << omg_target << ")";
    throw DEError(os.str());
  }
  Moments start = (guess && guess->mean > 0.0 && guess->variance > 0.0) ? *guess : consistent_guess(omf_target);
  double lm = std::log(start.mean), lv = std::log(start.variance);
  const double lf = std::log(omf_target), lg = std::log(omg_target);

  auto residual = [&](double a, double b, FgEval* out) {
    const FgEval e = evaluate(std::exp(a), std::exp(b));
    if (out) *out = e;
    return std::array<double, 2>{std::log(e.omf) - lf, std::log(e.omg) - lg};
  };
  auto norm = [](const std::array<double, 2>& r) { return std::max(std::abs(r[0]), std::abs(r[1])); };

  FgEval e;
  auto r = residual(lm, lv, &e);
  for (int it = 0; it < 200; ++it) {
    if (norm(r) < 1e-11) return {std::exp(lm), std::exp(lv)};
    const double m = std::exp(lm), v = std::exp(lv);
    const double j11 = -m * 0.5 * e.omg / e.omf;
    const double j12 = v * 0.25 * e.c / e.omf;
    const double j21 = -m * e.c / e.omg;
    const double j22 = -v * 0.25 * e.d / e.omg;
    const double det = j11 * j22 - j12 * j21;
    if (!(std::abs(det) > 1e-300)) break;
    double dm = (-r[0] * j22 + r[1] * j12) / det;
    double dv = (-r[1] * j11 + r[0] * j21) / det;
    // Keep steps in log space bounded, then backtrack on the residual norm.
    const double big = std::max(std::abs(dm), std::abs(dv));
    if (big > 2.0) {
      dm *= 2.0 / big;
      dv *= 2.0 / big;
    }
    double step = 1.0;
    const double r0 = norm(r);
    bool moved = false;
    for (int k = 0; k < 30; ++k) {
      FgEval trial_eval;
      const auto trial = residual(lm + step * dm, lv + step * dv, &trial_eval);
      if (std::isfinite(trial[0]) && std::isfinite(trial[1]) && norm(trial) < r0) {
        lm += step * dm;
        lv += step * dv;
        r = trial;
        e = trial_eval;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  if (norm(r) < 1e-8) return {std::exp(lm), std::exp(lv)};
  std::ostringstream os;
  os << "invert_fg: no convergence (1-f target " << omf_target << ", 1-g target " << omg_target
     << ", last m " << std::exp(lm) << ", var " << std::exp(lv) << ", residual " << norm(r) << ")";
  throw DEError(os.str());
}

std::vector<Moments> variable_step(const GaussianState& state, const DegreeDistribution& dist,
                                   const NoiseModel& noise) {
  const LlrStats ch = llr_stats(std::sqrt(noise.sigma2_n));
  std::vector<Moments> out;
  out.reserve(dist.lambda().size());
  for (const auto& term : dist.lambda()) {
    const double k = term.degree - 1;
    out.push_back({ch.mean + k * state.m_u, ch.variance + k * state.var_u + k * noise.sigma2_d});
  }
  return out;
}

CheckSampler::CheckSampler(std::size_t samples, int max_inputs, std::uint64_t seed)
    : samples_(samples), max_inputs_(max_inputs) {
  if (samples == 0 || max_inputs < 1) throw std::invalid_argument("CheckSampler: empty sample set");
  Rng rng(seed, {0x6465});
  normals_.resize(samples * max_inputs);
  uniforms_.resize(samples * max_inputs);
  for (auto& z : normals_) z = rng.normal();
  for (auto& u : uniforms_) u = rng.uniform();
}

namespace {

struct Targets {
  double omf;
  double omg;
};

// 1 - F_i and 1 - G_i for every rho term, by sampling.
std::vector<Targets> sampled_targets(const std::vector<Moments>& variable, const DegreeDistribution& dist,
                                     const NoiseModel& noise, const CheckSampler& sampler) {
  const auto& lam = dist.lambda();
  const auto& rho = dist.rho();
  const int inputs = dist.dc_max() - 1;
  if (sampler.max_inputs() < inputs) throw std::invalid_argument("check_step: sampler has too few inputs per sample");

  std::vector<double> cum(lam.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < lam.size(); ++j) cum[j] = (acc += lam[j].fraction);
  std::vector<double> mean(lam.size()), sd(lam.size());
  for (std::size_t j = 0; j < lam.size(); ++j) {
    mean[j] = variable[j].mean;
    sd[j] = std::sqrt(variable[j].variance + noise.sigma2_d);
  }

  // slot[k] lists the rho terms whose extrinsic product has k + 1 factors.
  std::vector<std::vector<std::size_t>> slot(inputs);
  for (std::size_t i = 0; i < rho.size(); ++i) slot[rho[i].degree - 2].push_back(i);

  std::vector<double> sum_f(rho.size(), 0.0), sum_g(rho.size(), 0.0);
  for (std::size_t s = 0; s < sampler.samples(); ++s) {
    double log_mag = 0.0;  // sum of phi magnitudes, negated below
    bool negative = false;
    for (int k = 0; k < inputs; ++k) {
      std::size_t j = 0;
      if (lam.size() > 1) {
        const double u = sampler.uniform(s, k) * acc;
        while (j + 1 < lam.size() && u >= cum[j]) ++j;
      }
      const double x = mean[j] + sd[j] * sampler.normal(s, k);
      log_mag += phi(std::abs(x));
      negative ^= x < 0.0;
      if (slot[k].empty()) continue;
      const double S = -log_mag;
      const double omp = negative ? 1.0 + std::exp(S) : -std::expm1(S);
      const double omp2 = -std::expm1(2.0 * S);
      for (std::size_t i : slot[k]) {
        sum_f[i] += omp;
        sum_g[i] += omp2;
      }
    }
  }
  std::vector<Targets> out(rho.size());
  const double n = static_cast<double>(sampler.samples());
  for (std::size_t i = 0; i < rho.size(); ++i) out[i] = {sum_f[i] / n, sum_g[i] / n};
  return out;
}

std::vector<Targets> quadrature_targets(const std::vector<Moments>& variable, const DegreeDistribution& dist,
                                        const NoiseModel& noise) {
  const auto& lam = dist.lambda();
  double a = 0.0, b = 0.0;
  for (std::size_t j = 0; j < lam.size(); ++j) {
    const double v = variable[j].variance + noise.sigma2_d;
    a += lam[j].fraction * one_minus_f(variable[j].mean, v);
    b += lam[j].fraction * one_minus_g(variable[j].mean, v);
  }
  std::vector<Targets> out;
  for (const auto& term : dist.rho()) {
    const double k = term.degree - 1;
    out.push_back({-std::expm1(k * std::log1p(-a)), -std::expm1(k * std::log1p(-b))});
  }
  return out;
}

}  // namespace

Moments check_step(const std::vector<Moments>& variable, const DegreeDistribution& dist, const NoiseModel& noise,
                   const CheckSampler* sampler, std::optional<Moments> guess) {
  if (variable.size() != dist.lambda().size()) throw std::invalid_argument("check_step: moment count mismatch");
  const auto targets = sampler ? sampled_targets(variable, dist, noise, *sampler)
                               : quadrature_targets(variable, dist, noise);
  const auto& rho = dist.rho();
  double m = 0.0, second = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (targets[i].omf < 1e-300 || targets[i].omg < 1e-300) return {kInf, kInf};
    const Moments mi = invert_fg(targets[i].omf, targets[i].omg, guess);
    m += rho[i].fraction * mi.mean;
    second += rho[i].fraction * (mi.variance + mi.mean * mi.mean);
  }
  return {m, std::max(0.0, second - m * m)};
}

double error_probability(double m, double var) {
  if (var <= 0.0) return m > 0.0 ? 0.0 : (m < 0.0 ? 1.0 : 0.5);
  return q_function(m / std::sqrt(var));
}

DEResult run(const DegreeDistribution& dist, const NoiseModel& noise, const DEParams& params) {
  std::optional<CheckSampler> sampler;
  if (params.method == CheckMethod::monte_carlo) sampler.emplace(params.mc_samples, dist.dc_max() - 1, params.seed);

  DEResult result;
  result.state.m_v.resize(dist.lambda().size());
  result.state.var_v.resize(dist.lambda().size());
  std::optional<Moments> guess;
  for (int it = 1; it <= params.max_iterations; ++it) {
    const auto vars = variable_step(result.state, dist, noise);
    for (std::size_t j = 0; j < vars.size(); ++j) {
      result.state.m_v[j] = vars[j].mean;
      result.state.var_v[j] = vars[j].variance;
    }
    const Moments u = check_step(vars, dist, noise, sampler ? &*sampler : nullptr, guess);
    const double previous = result.state.m_u;
    result.state.m_u = u.mean;
    result.state.var_u = u.variance;
    result.trace.push_back(u);
    result.iterations = it;
    if (u.mean >= params.convergence_mean) {
      result.converged = true;
      break;
    }
    // A fixed point below the convergence level will not move again.
    if (std::abs(u.mean - previous) < 1e-12 * (1.0 + u.mean)) break;
    guess = u;
  }
  return result;
}

bool converges(const DegreeDistribution& dist, double snr_db, double sigma2_d, const DEParams& params) {
  const double sn = snr_db_to_sigma_n(snr_db, rate(dist));
  return run(dist, NoiseModel{sn * sn, sigma2_d}, params).converged;
}

ThresholdResult threshold(const DegreeDistribution& dist, double sigma2_d, double tol_db, const DEParams& params) {
  if (!(tol_db > 0.0)) throw std::invalid_argument("threshold: tol_db must be positive");
  ThresholdResult out;
  double lo = -2.0, hi = 10.0;
  auto test = [&](double snr) {
    ++out.de_runs;
    return converges(dist, snr, sigma2_d, params);
  };
  if (!test(hi) || test(lo)) throw DEError("threshold: bracket not found in [-2, 10] dB");
  while (hi - lo > tol_db) {
    const double mid = 0.5 * (lo + hi);
    if (test(mid))
      hi = mid;
    else
      lo = mid;
  }
  out.snr_db = hi;
  out.sigma_n = snr_db_to_sigma_n(hi, rate(dist));
  return out;
}

}  // namespace noisyldpc::de
