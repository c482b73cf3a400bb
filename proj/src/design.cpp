#include "noisyldpc/design.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "noisyldpc/de.hpp"
#include "noisyldpc/lp.hpp"
#include "noisyldpc/rng.hpp"

namespace noisyldpc::design {

namespace {

constexpr double kSlackBound = 2.0;  // |t| <= 2 keeps the LP bounded

exit::ExitCurve cached(CurveCache* cache, const exit::CurveMeta& meta, const std::vector<double>& grid,
                       const std::function<exit::ExitCurve()>& compute) {
  return cache ? cache->get_or_compute(meta, grid, compute) : compute();
}

}  // namespace

std::optional<LambdaFit> feasible_lambda(const EdgePolynomial& rho, const std::vector<exit::ExitCurve>& vcurves,
                                         const exit::ExitCurve& ccurve, double rate, double margin) {
  if (vcurves.empty()) throw std::invalid_argument("feasible_lambda: no variable curves");
  if (!(rate > 0.0 && rate < 1.0)) throw std::invalid_argument("feasible_lambda: rate must lie in (0, 1)");
  const auto& grid = ccurve.grid;
  for (const auto& v : vcurves)
    if (v.grid != grid) throw std::invalid_argument("feasible_lambda: curves use different grids");

  const auto points = exit::constraint_points(grid);
  std::vector<double> levels;
  for (auto k : points) levels.push_back(grid[k]);
  const auto needed = exit::invert_check(ccurve, levels);

  // Variables: lambda per curve, then t + kSlackBound.
  const std::size_t nv = vcurves.size();
  lp::Problem p;
  p.c.assign(nv + 1, 0.0);
  p.c[nv] = 1.0;
  for (std::size_t j = 0; j < points.size(); ++j) {
    std::vector<double> row(nv + 1);
    for (std::size_t i = 0; i < nv; ++i) row[i] = -vcurves[i].ie[points[j]];
    row[nv] = 1.0;
    p.a_ub.push_back(std::move(row));
    p.b_ub.push_back(kSlackBound - needed[j] - margin);
  }
  std::vector<double> cap(nv + 1, 0.0);
  cap[nv] = 1.0;
  p.a_ub.push_back(cap);
  p.b_ub.push_back(2.0 * kSlackBound);

  std::vector<double> ones(nv + 1, 1.0), inv(nv + 1, 0.0);
  ones[nv] = 0.0;
  for (std::size_t i = 0; i < nv; ++i) inv[i] = 1.0 / vcurves[i].meta.degree;
  p.a_eq = {ones, inv};
  p.b_eq = {1.0, integral(rho) / (1.0 - rate)};

  const auto sol = lp::solve(p);
  if (sol.status == lp::Status::unbounded) throw LpError("feasible_lambda: LP unbounded");
  if (sol.status == lp::Status::infeasible) return std::nullopt;
  const double slack = sol.x[nv] - kSlackBound;
  if (slack < 0.0) return std::nullopt;

  LambdaFit fit;
  fit.slack = slack;
  double total = 0.0;
  for (std::size_t i = 0; i < nv; ++i) total += sol.x[i];
  for (std::size_t i = 0; i < nv; ++i)
    if (sol.x[i] > 1e-12) fit.lambda.push_back({vcurves[i].meta.degree, sol.x[i] / total});
  return fit;
}

DesignResult design_code(const DesignSpec& spec, CurveCache* cache) {
  if (!(spec.rate > 0.0 && spec.rate < 1.0)) throw std::invalid_argument("design: rate must lie in (0, 1)");
  if (!(spec.delta_db > 0.0)) throw std::invalid_argument("design: delta_db must be positive");
  if (spec.alpha_grid_size < 1) throw std::invalid_argument("design: alpha grid size must be at least 1");
  if (spec.dc < 3) throw std::invalid_argument("design: dc must be at least 3");

  std::vector<int> degrees = spec.variable_degrees;
  if (degrees.empty())
    for (int d = 2; d <= spec.dv_max; ++d) degrees.push_back(d);
  if (degrees.empty()) throw std::invalid_argument("design: no variable degrees");

  double snr = 0.0;
  if (spec.initial_snr_db) {
    snr = *spec.initial_snr_db;
  } else {
    de::DEParams params;
    params.method = de::CheckMethod::quadrature;
    snr = de::threshold(DegreeDistribution::regular(3, spec.dc), spec.sigma2_d, 0.01, params).snr_db + 1.0;
  }

  // Check curves do not depend on the SNR: compute both once.
  std::map<int, exit::ExitCurve> check;
  for (int d : {spec.dc, spec.dc + 1}) {
    const exit::CurveMeta meta{exit::NodeKind::check, d, std::nullopt, 0.0, spec.sigma2_d, spec.trials,
                               derive_seed(spec.seed, {0x63, static_cast<std::uint64_t>(d)})};
    check[d] = cached(cache, meta, spec.grid, [&] {
      return exit::ncnd_curve(d, spec.sigma2_d, spec.grid, spec.trials, meta.seed, spec.threads);
    });
  }

  DesignResult result;
  bool found = false;
  const double floor_db = -5.0;
  while (snr >= floor_db) {
    std::vector<exit::ExitCurve> vcurves;
    for (int d : degrees) {
      const exit::CurveMeta meta{exit::NodeKind::variable, d, snr, spec.rate, spec.sigma2_d, spec.trials,
                                 derive_seed(spec.seed, {0x76, static_cast<std::uint64_t>(d)})};
      vcurves.push_back(cached(cache, meta, spec.grid, [&] {
        return exit::nvnd_curve(d, snr, spec.rate, spec.sigma2_d, spec.grid, spec.trials, meta.seed, spec.threads);
      }));
    }

    TraceEntry best{snr, false, 0.0, -1.0, {}};
    for (int k = 0; k <= spec.alpha_grid_size; ++k) {
      const double alpha = static_cast<double>(k) / spec.alpha_grid_size;
      const EdgePolynomial rho = two_term_check(spec.dc, alpha);
      std::vector<exit::ExitCurve> parts;
      std::vector<double> weights;
      for (const auto& t : rho) {
        parts.push_back(check.at(t.degree));
        weights.push_back(t.fraction);
      }
      const auto fit = feasible_lambda(rho, vcurves, exit::effective_curve(parts, weights), spec.rate, spec.margin);
      if (fit && fit->slack > best.slack) best = {snr, true, alpha, fit->slack, fit->lambda};
    }
    result.trace.push_back(best);
    if (!best.feasible) break;
    found = true;
    result.dist = DegreeDistribution(best.lambda, two_term_check(spec.dc, best.alpha)).normalized();
    result.snr_th_db = snr;
    result.alpha = best.alpha;
    result.slack = best.slack;
    snr -= spec.delta_db;
  }
  if (!found) {
    std::ostringstream os;
    os << "design: no feasible code at the initial SNR " << snr << " dB; start from a higher SNR";
    throw DesignError(os.str());
  }
  return result;
}

}  // namespace noisyldpc::design
