#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "noisyldpc/graph.hpp"
#include "noisyldpc/rng.hpp"

namespace noisyldpc {

struct DecoderConfig {
  int max_iterations = 80;
  /// Variance of the Gaussian noise added to every exchanged message.
  double sigma2_d = 0.0;
  /// Magnitude cap applied to every stored message.
  double llr_clamp = 30.0;
  /// Stop as soon as the hard decision satisfies every check.
  bool early_stop = true;
};

struct DecodeResult {
  std::vector<std::uint8_t> hard_bits;
  bool success = false;
  int iterations_used = 0;
  std::vector<double> final_llrs;
};

/// phi(x) = -ln tanh(x / 2) for x >= 0; phi is its own inverse,
/// phi(0) = +inf and phi(+inf) = 0.
double phi(double x);

/// Extrinsic sums v_e = u0 + sum_{i != e} incoming_i, clamped.
void variable_update(double u0, std::span<const double> incoming, std::span<double> outgoing, double clamp);

/// Extrinsic tanh rule u_e = 2 atanh(prod_{j != e} tanh(incoming_j / 2)),
/// computed in sign / phi-magnitude form and clamped.
void check_update(std::span<const double> incoming, std::span<double> outgoing, double clamp);

/// Adds fresh i.i.d. N(0, sigma2_d) draws to every message.
void inject_noise(std::span<double> messages, double sigma2_d, Rng& rng);

/// Flooding sum-product decoder with internal message noise. Holds message
/// buffers sized for one graph; one instance per worker thread.
class Decoder {
 public:
  Decoder(const TannerGraph& graph, DecoderConfig cfg);

  const DecoderConfig& config() const { return cfg_; }

  DecodeResult decode(std::span<const double> channel_llrs, Rng& rng);

 private:
  const TannerGraph& graph_;
  DecoderConfig cfg_;
  std::vector<double> var_to_check_;
  std::vector<double> check_to_var_;
  std::vector<double> in_scratch_;
  std::vector<double> out_scratch_;
};

DecodeResult decode(const TannerGraph& graph, std::span<const double> channel_llrs, const DecoderConfig& cfg,
                    Rng& rng);

}  // namespace noisyldpc
