#pragma once

#include <cstddef>
#include <vector>

#include "noisyldpc/rng.hpp"

namespace noisyldpc {

/// Channel noise variance and internal decoder noise variance.
struct NoiseModel {
  double sigma2_n = 1.0;
  double sigma2_d = 0.0;
};

/// Mean and variance of the channel LLR under the all-one BPSK word.
struct LlrStats {
  double mean = 0.0;
  double variance = 0.0;
};

/// SNR is Eb/N0 in dB. sigma_n = (2 r 10^(snr/10))^(-1/2).
double snr_db_to_sigma_n(double snr_db, double rate);
double sigma_n_to_snr_db(double sigma_n, double rate);

/// m0 = 2 / sigma_n^2, var0 = 4 / sigma_n^2.
LlrStats llr_stats(double sigma_n);

/// Channel LLRs for n transmitted +1 symbols: (2 / sigma_n^2)(1 + n_c),
/// n_c ~ N(0, sigma_n^2).
std::vector<double> transmit_all_one(std::size_t n, double sigma_n, Rng& rng);

/// Gaussian tail probability Q(x) = P(Z > x).
double q_function(double x);

}  // namespace noisyldpc
