#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "noisyldpc/decoder.hpp"
#include "noisyldpc/graph.hpp"

namespace noisyldpc::harness {

struct StopRule {
  std::size_t block_errors = 50;
  /// Per-point budget in simulated bits.
  std::size_t max_bits = 10'000'000;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for k successes in n trials (95% by default).
Interval wilson(std::size_t k, std::size_t n, double z = 1.959963984540054);

struct BerPoint {
  double snr_db = 0.0;
  double sigma2_d = 0.0;
  std::size_t bit_errors = 0;
  std::size_t block_errors = 0;
  std::size_t bits_simulated = 0;
  std::size_t blocks_simulated = 0;
  double ber = 0.0;
  double bler = 0.0;
  Interval ber_ci;
  Interval bler_ci;
  double mean_iterations = 0.0;
  /// The bit budget ran out before the block-error target was reached.
  bool capped = false;
  /// No errors were seen; only ber_ci.hi is informative.
  bool upper_bound = false;
};

/// Decodes independent all-zero codewords (BPSK +1 on every bit) at each SNR
/// until the stop rule fires. Block b at SNR index s draws from an RNG stream
/// derived from (seed, s, b), and blocks are tallied in index order, so the
/// result is the same for any thread count. rate defaults to 1 - K/N.
std::vector<BerPoint> ber_sim(const TannerGraph& graph, const std::vector<double>& snr_db, double sigma2_d,
                              const StopRule& stop, DecoderConfig cfg, std::uint64_t seed, int threads = 1,
                              std::optional<double> rate = std::nullopt);

}  // namespace noisyldpc::harness
