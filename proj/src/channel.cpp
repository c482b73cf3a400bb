#include "noisyldpc/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace noisyldpc {

double snr_db_to_sigma_n(double snr_db, double rate) {
  if (!(rate > 0.0 && rate < 1.0)) throw std::invalid_argument("rate must lie in (0, 1)");
  return 1.0 / std::sqrt(2.0 * rate * std::pow(10.0, snr_db / 10.0));
}

double sigma_n_to_snr_db(double sigma_n, double rate) {
  if (!(rate > 0.0 && rate < 1.0)) throw std::invalid_argument("rate must lie in (0, 1)");
  if (!(sigma_n > 0.0)) throw std::invalid_argument("sigma_n must be positive");
  return 10.0 * std::log10(1.0 / (2.0 * rate * sigma_n * sigma_n));
}

LlrStats llr_stats(double sigma_n) {
  if (!(sigma_n > 0.0)) throw std::invalid_argument("sigma_n must be positive");
  const double s2 = sigma_n * sigma_n;
  return {2.0 / s2, 4.0 / s2};
}

std::vector<double> transmit_all_one(std::size_t n, double sigma_n, Rng& rng) {
  if (!(sigma_n > 0.0)) throw std::invalid_argument("sigma_n must be positive");
  const double scale = 2.0 / (sigma_n * sigma_n);
  std::vector<double> llr(n);
  for (auto& y : llr) y = scale * (1.0 + sigma_n * rng.normal());
  return llr;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace noisyldpc
