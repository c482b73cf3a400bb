#include "noisyldpc/exit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gaussian.hpp"
#include "noisyldpc/channel.hpp"
#include "noisyldpc/decoder.hpp"
#include "noisyldpc/parallel.hpp"
#include "noisyldpc/rng.hpp"

namespace noisyldpc::exit {

namespace {

constexpr int kBins = 2000;

// log2(1 + e^-x) without overflow.
double log2_one_plus_exp_neg(double x) {
  const double v = x > 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
  return v / std::numbers::ln2;
}

double one_minus_j(double sigma) {
  if (sigma <= 0.0) return 1.0;
  return detail::gaussian_expectation(0.5 * sigma * sigma, sigma * sigma, log2_one_plus_exp_neg);
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("EXIT grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0.0 && grid[k] < 1.0)) throw std::invalid_argument("EXIT grid points must lie in [0, 1)");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw std::invalid_argument("EXIT grid must be strictly increasing");
  }
}

}  // namespace

double j_fun(double sigma) {
  if (sigma < 0.0) throw std::domain_error("j_fun: negative sigma");
  if (sigma == 0.0) return 0.0;
  if (std::isinf(sigma)) return 1.0;
  return std::clamp(1.0 - one_minus_j(sigma), 0.0, 1.0);
}

double j_inv(double info) {
  if (!(info >= 0.0 && info < 1.0)) throw std::domain_error("j_inv: information must lie in [0, 1)");
  if (info == 0.0) return 0.0;
  const double target = 1.0 - info;
  double lo = 0.0, hi = 1.0;
  while (one_minus_j(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e4) throw std::domain_error("j_inv: information too close to 1");
  }
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (one_minus_j(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double mutual_information(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("mutual_information: no samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / n);
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    if (!std::isfinite(mean)) return 1.0;
    return mean == 0.0 ? 0.0 : 1.0;
  }

  const double range = std::abs(mean) + 8.0 * sd;
  std::vector<double> p(kBins, 0.0);
  const double scale = kBins / (2.0 * range);
  for (double x : samples) {
    if (!(x >= -range && x <= range)) continue;
    const int b = std::min(kBins - 1, static_cast<int>((x + range) * scale));
    p[b] += 1.0;
  }
  for (auto& v : p) v /= n;

  // Bin k mirrors to bin kBins - 1 - k, which is the density of -y.
  double info = 0.0;
  for (int k = 0; k < kBins; ++k) {
    if (p[k] <= 0.0) continue;
    info += p[k] * std::log2(2.0 * p[k] / (p[k] + p[kBins - 1 - k]));
  }
  return std::clamp(info, 0.0, 1.0);
}

std::string to_string(NodeKind kind) { return kind == NodeKind::variable ? "variable" : "check"; }

std::vector<double> default_grid() {
  std::vector<double> g(100);
  for (int k = 0; k < 100; ++k) g[k] = k / 100.0;
  return g;
}

ExitCurve nvnd_curve(int dv, double snr_db, double rate, double sigma2_d, const std::vector<double>& grid,
                     std::size_t n_trials, std::uint64_t seed, int threads) {
  if (dv < 1) throw std::invalid_argument("nvnd_curve: degree must be positive");
  if (sigma2_d < 0.0) throw std::invalid_argument("nvnd_curve: negative sigma2_d");
  if (n_trials == 0) throw std::invalid_argument("nvnd_curve: zero trials");
  check_grid(grid);

  const double sigma_n = snr_db_to_sigma_n(snr_db, rate);
  Rng channel_rng(seed, {0x6368616e});
  const std::vector<double> y = transmit_all_one(n_trials, sigma_n, channel_rng);
  const double noise_sd = std::sqrt(sigma2_d);

  ExitCurve curve;
  curve.grid = grid;
  curve.ie.assign(grid.size(), 0.0);
  curve.meta = {NodeKind::variable, dv, snr_db, rate, sigma2_d, n_trials, seed};
  parallel_for(grid.size(), threads, [&](std::size_t k) {
    Rng rng(seed, {0x76, k});
    const double sa = j_inv(grid[k]);
    std::vector<double> out(n_trials);
    for (std::size_t s = 0; s < n_trials; ++s) {
      double total = y[s];
      for (int i = 0; i < dv - 1; ++i) total += 0.5 * sa * sa + sa * rng.normal() + noise_sd * rng.normal();
      out[s] = total;
    }
    curve.ie[k] = mutual_information(out);
  });
  return curve;
}

ExitCurve ncnd_curve(int dc, double sigma2_d, const std::vector<double>& grid, std::size_t n_trials,
                     std::uint64_t seed, int threads) {
  if (dc < 2) throw std::invalid_argument("ncnd_curve: degree must be at least 2");
  if (sigma2_d < 0.0) throw std::invalid_argument("ncnd_curve: negative sigma2_d");
  if (n_trials == 0) throw std::invalid_argument("ncnd_curve: zero trials");
  check_grid(grid);
  const double noise_sd = std::sqrt(sigma2_d);

  ExitCurve curve;
  curve.grid = grid;
  curve.ie.assign(grid.size(), 0.0);
  curve.meta = {NodeKind::check, dc, std::nullopt, 0.0, sigma2_d, n_trials, seed};
  parallel_for(grid.size(), threads, [&](std::size_t k) {
    Rng rng(seed, {0x63, k});
    const double sa = j_inv(grid[k]);
    std::vector<double> out(n_trials);
    for (std::size_t s = 0; s < n_trials; ++s) {
      double mag = 0.0;
      bool negative = false;
      for (int i = 0; i < dc - 1; ++i) {
        const double x = 0.5 * sa * sa + sa * rng.normal() + noise_sd * rng.normal();
        mag += phi(std::abs(x));
        negative ^= x < 0.0;
      }
      const double u = phi(mag);
      out[s] = negative ? -u : u;
    }
    curve.ie[k] = mutual_information(out);
  });
  return curve;
}

double vnd_closed_form(int dv, double snr_db, double rate, double ia) {
  const double sigma_n = snr_db_to_sigma_n(snr_db, rate);
  const double sa = j_inv(ia);
  return j_fun(std::sqrt(llr_stats(sigma_n).variance + (dv - 1) * sa * sa));
}

ExitCurve effective_curve(const std::vector<ExitCurve>& curves, std::span<const double> weights) {
  if (curves.empty() || curves.size() != weights.size())
    throw std::invalid_argument("effective_curve: need one weight per curve");
  ExitCurve out;
  out.grid = curves.front().grid;
  out.ie.assign(out.grid.size(), 0.0);
  out.meta = curves.front().meta;
  out.meta.degree = curves.size() == 1 ? curves.front().meta.degree : 0;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    if (curves[c].grid != out.grid) throw std::invalid_argument("effective_curve: curves use different grids");
    for (std::size_t k = 0; k < out.grid.size(); ++k) out.ie[k] += weights[c] * curves[c].ie[k];
  }
  for (auto& v : out.ie) v = std::clamp(v, 0.0, 1.0);
  return out;
}

std::vector<double> isotonic(std::span<const double> values) {
  struct Block {
    double sum;
    std::size_t count;
    double mean() const { return sum / count; }
  };
  std::vector<Block> blocks;
  for (double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      blocks[blocks.size() - 2].sum += blocks.back().sum;
      blocks[blocks.size() - 2].count += blocks.back().count;
      blocks.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean());
  return out;
}

std::vector<double> invert_check(const ExitCurve& check, std::span<const double> levels) {
  std::vector<double> xs = check.grid;
  std::vector<double> ys = isotonic(check.ie);
  xs.push_back(1.0);
  ys.push_back(1.0);
  std::vector<double> out;
  out.reserve(levels.size());
  for (double level : levels) {
    const auto it = std::lower_bound(ys.begin(), ys.end(), level);
    if (it == ys.begin()) {
      out.push_back(xs.front());
      continue;
    }
    if (it == ys.end()) {
      out.push_back(1.0);
      continue;
    }
    const std::size_t k = it - ys.begin();
    const double t = (level - ys[k - 1]) / (ys[k] - ys[k - 1]);
    out.push_back(xs[k - 1] + t * (xs[k] - xs[k - 1]));
  }
  return out;
}

std::vector<std::size_t> constraint_points(std::span<const double> grid) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k)
    if (grid[k] < 0.999) idx.push_back(k);
  if (idx.empty() && !grid.empty() && grid.front() < 0.999) idx.push_back(0);
  return idx;
}

std::vector<double> tunnel_slack(const ExitCurve& vcurve, const ExitCurve& ccurve) {
  if (vcurve.grid != ccurve.grid) throw std::invalid_argument("tunnel_slack: curves use different grids");
  const auto idx = constraint_points(vcurve.grid);
  std::vector<double> levels;
  for (auto k : idx) levels.push_back(vcurve.grid[k]);
  const auto needed = invert_check(ccurve, levels);
  std::vector<double> slack(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) slack[j] = vcurve.ie[idx[j]] - needed[j];
  return slack;
}

bool tunnel_open(const ExitCurve& vcurve, const ExitCurve& ccurve, double margin) {
  const auto slack = tunnel_slack(vcurve, ccurve);
  return std::all_of(slack.begin(), slack.end(), [&](double s) { return s >= margin; });
}

}  // namespace noisyldpc::exit
