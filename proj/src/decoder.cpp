#include "noisyldpc/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace noisyldpc {

namespace {

inline double clamp_abs(double x, double cap) { return std::clamp(x, -cap, cap); }

}  // namespace

double phi(double x) {
  if (!(x > 0.0)) return std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return 0.0;
  // -ln tanh(x/2) = ln(1 + 2 / (e^x - 1)), accurate at both ends.
  return std::log1p(2.0 / std::expm1(x));
}

void variable_update(double u0, std::span<const double> incoming, std::span<double> outgoing, double clamp) {
  double total = u0;
  for (double m : incoming) total += m;
  for (std::size_t e = 0; e < incoming.size(); ++e) outgoing[e] = clamp_abs(total - incoming[e], clamp);
}

void check_update(std::span<const double> incoming, std::span<double> outgoing, double clamp) {
  const std::size_t d = incoming.size();
  if (d == 0) return;
  // Prefix/suffix sums of phi magnitudes avoid inf - inf and cancellation.
  thread_local std::vector<double> mag;
  thread_local std::vector<double> suffix;
  mag.resize(d);
  suffix.resize(d + 1);
  unsigned negatives = 0;
  for (std::size_t j = 0; j < d; ++j) {
    mag[j] = phi(std::abs(incoming[j]));
    negatives ^= incoming[j] < 0.0 ? 1u : 0u;
  }
  suffix[d] = 0.0;
  for (std::size_t j = d; j-- > 0;) suffix[j] = suffix[j + 1] + mag[j];
  double prefix = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double extrinsic = prefix + suffix[j + 1];
    const unsigned sign = negatives ^ (incoming[j] < 0.0 ? 1u : 0u);
    const double value = phi(extrinsic);
    outgoing[j] = clamp_abs(sign ? -value : value, clamp);
    prefix += mag[j];
  }
}

void inject_noise(std::span<double> messages, double sigma2_d, Rng& rng) {
  if (sigma2_d < 0.0) throw std::invalid_argument("inject_noise: negative variance");
  if (sigma2_d == 0.0) return;
  const double sd = std::sqrt(sigma2_d);
  for (auto& m : messages) m += sd * rng.normal();
}

Decoder::Decoder(const TannerGraph& graph, DecoderConfig cfg)
    : graph_(graph),
      cfg_(cfg),
      var_to_check_(graph.n_edges()),
      check_to_var_(graph.n_edges()),
      in_scratch_(std::max(graph.max_var_degree(), graph.max_check_degree())),
      out_scratch_(in_scratch_.size()) {
  if (cfg_.max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (!(cfg_.llr_clamp > 0.0)) throw std::invalid_argument("llr_clamp must be positive");
  if (cfg_.sigma2_d < 0.0) throw std::invalid_argument("sigma2_d must be non-negative");
}

DecodeResult Decoder::decode(std::span<const double> channel_llrs, Rng& rng) {
  const int n = graph_.n_vars();
  if (channel_llrs.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("decode: LLR vector length does not match the graph");

  const double clamp = cfg_.llr_clamp;
  std::fill(check_to_var_.begin(), check_to_var_.end(), 0.0);

  DecodeResult result;
  result.hard_bits.assign(n, 0);
  result.final_llrs.assign(n, 0.0);

  auto hard_decision = [&] {
    for (int v = 0; v < n; ++v) {
      double total = channel_llrs[v];
      for (int e : graph_.var_edges(v)) total += check_to_var_[e];
      result.final_llrs[v] = total;
      result.hard_bits[v] = total < 0.0 ? 1 : 0;
    }
  };

  for (int it = 1; it <= cfg_.max_iterations; ++it) {
    // Variable edges are contiguous in edge order.
    for (int v = 0; v < n; ++v) {
      const auto edges = graph_.var_edges(v);
      if (edges.empty()) continue;
      const std::size_t first = edges.front();
      variable_update(channel_llrs[v], std::span<const double>(check_to_var_).subspan(first, edges.size()),
                      std::span<double>(var_to_check_).subspan(first, edges.size()), clamp);
    }
    inject_noise(var_to_check_, cfg_.sigma2_d, rng);
    if (cfg_.sigma2_d > 0.0)
      for (auto& m : var_to_check_) m = clamp_abs(m, clamp);

    for (int c = 0; c < graph_.n_checks(); ++c) {
      const auto edges = graph_.check_edges(c);
      const std::size_t d = edges.size();
      for (std::size_t j = 0; j < d; ++j) in_scratch_[j] = var_to_check_[edges[j]];
      check_update(std::span<const double>(in_scratch_).first(d), std::span<double>(out_scratch_).first(d), clamp);
      for (std::size_t j = 0; j < d; ++j) check_to_var_[edges[j]] = out_scratch_[j];
    }
    inject_noise(check_to_var_, cfg_.sigma2_d, rng);
    if (cfg_.sigma2_d > 0.0)
      for (auto& m : check_to_var_) m = clamp_abs(m, clamp);

    hard_decision();
    result.iterations_used = it;
    if (cfg_.early_stop && syndrome_ok(graph_, result.hard_bits)) break;
  }
  result.success = syndrome_ok(graph_, result.hard_bits);
  return result;
}

DecodeResult decode(const TannerGraph& graph, std::span<const double> channel_llrs, const DecoderConfig& cfg,
                    Rng& rng) {
  Decoder decoder(graph, cfg);
  return decoder.decode(channel_llrs, rng);
}

}  // namespace noisyldpc
