#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace noisyldpc::exit {

/// Mutual information between a bit and a consistent Gaussian LLR
/// N(sigma^2 / 2, sigma^2).
double j_fun(double sigma);

/// Inverse of j_fun by bisection; throws std::domain_error for info outside [0, 1).
double j_inv(double info);

/// Histogram estimate of the mutual information carried by LLR samples
/// observed under +1 transmission, completing the -1 density by symmetry.
double mutual_information(std::span<const double> samples);

enum class NodeKind { variable, check };

std::string to_string(NodeKind kind);

struct CurveMeta {
  NodeKind kind = NodeKind::variable;
  /// Node degree; 0 for a weighted mixture of degrees.
  int degree = 0;
  /// Channel SNR (Eb/N0, dB) and code rate; unset for check curves.
  std::optional<double> snr_db;
  double rate = 0.5;
  double sigma2_d = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

struct ExitCurve {
  std::vector<double> grid;
  std::vector<double> ie;
  CurveMeta meta;
};

/// 0, 0.01, ..., 0.99.
std::vector<double> default_grid();

/// Extrinsic information of a variable node with internal noise on its
/// dv - 1 a-priori inputs. The channel LLR sample is drawn once per curve and
/// each grid point uses its own RNG stream, so results do not depend on threads.
ExitCurve nvnd_curve(int dv, double snr_db, double rate, double sigma2_d, const std::vector<double>& grid,
                     std::size_t n_trials, std::uint64_t seed, int threads = 1);

/// Same for a check node with dc - 1 noisy a-priori inputs and no channel input.
ExitCurve ncnd_curve(int dc, double sigma2_d, const std::vector<double>& grid, std::size_t n_trials,
                     std::uint64_t seed, int threads = 1);

/// Closed-form variable curve for a noiseless decoder:
/// J(sqrt(sigma_ch^2 + (dv - 1) J^-1(I_A)^2)).
double vnd_closed_form(int dv, double snr_db, double rate, double ia);

/// Pointwise weighted sum of curves sharing one grid.
ExitCurve effective_curve(const std::vector<ExitCurve>& curves, std::span<const double> weights);

/// Least-squares nondecreasing fit (pool adjacent violators).
std::vector<double> isotonic(std::span<const double> values);

/// Smallest a-priori input at which the (isotonically smoothed) check curve
/// reaches each of the given output levels, by linear interpolation. The
/// point (1, 1) is appended before inverting.
std::vector<double> invert_check(const ExitCurve& check, std::span<const double> levels);

/// Grid indices at which the tunnel condition is enforced: all points below
/// 0.999 except the last grid point, where the curves saturate.
std::vector<std::size_t> constraint_points(std::span<const double> grid);

/// Per constraint point: vcurve(x) - check^-1(x).
std::vector<double> tunnel_slack(const ExitCurve& vcurve, const ExitCurve& ccurve);

/// True iff every constraint point has slack of at least margin.
bool tunnel_open(const ExitCurve& vcurve, const ExitCurve& ccurve, double margin = 1e-3);

}  // namespace noisyldpc::exit
