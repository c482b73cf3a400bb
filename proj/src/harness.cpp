#include "noisyldpc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "noisyldpc/channel.hpp"
#include "noisyldpc/parallel.hpp"
#include "noisyldpc/rng.hpp"

namespace noisyldpc::harness {

Interval wilson(std::size_t k, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = k / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

constexpr std::size_t kBatch = 32;

struct BlockOutcome {
  std::size_t bit_errors = 0;
  int iterations = 0;
};

}  // namespace

std::vector<BerPoint> ber_sim(const TannerGraph& graph, const std::vector<double>& snr_db, double sigma2_d,
                              const StopRule& stop, DecoderConfig cfg, std::uint64_t seed, int threads,
                              std::optional<double> rate) {
  const int n = graph.n_vars();
  if (n < 1) throw std::invalid_argument("ber_sim: empty graph");
  if (stop.block_errors < 1) throw std::invalid_argument("ber_sim: block-error target must be positive");
  const double r = rate.value_or(1.0 - static_cast<double>(graph.n_checks()) / n);
  cfg.sigma2_d = sigma2_d;
  const std::size_t max_blocks = std::max<std::size_t>(1, stop.max_bits / n);

  const std::size_t workers = worker_count(kBatch, threads);
  std::vector<std::unique_ptr<Decoder>> decoders;
  for (std::size_t w = 0; w < workers; ++w) decoders.push_back(std::make_unique<Decoder>(graph, cfg));

  std::vector<BerPoint> out;
  for (std::size_t si = 0; si < snr_db.size(); ++si) {
    const double sigma_n = snr_db_to_sigma_n(snr_db[si], r);
    BerPoint pt;
    pt.snr_db = snr_db[si];
    pt.sigma2_d = sigma2_d;
    double iteration_sum = 0.0;
    std::vector<BlockOutcome> batch(kBatch);
    bool done = false;
    for (std::size_t first = 0; !done && first < max_blocks; first += kBatch) {
      const std::size_t count = std::min(kBatch, max_blocks - first);
      parallel_for_workers(count, threads, [&](std::size_t j, std::size_t worker) {
        Rng rng(seed, {static_cast<std::uint64_t>(si), static_cast<std::uint64_t>(first + j)});
        const auto llrs = transmit_all_one(n, sigma_n, rng);
        const auto res = decoders[worker]->decode(llrs, rng);
        BlockOutcome o;
        o.iterations = res.iterations_used;
        for (auto b : res.hard_bits) o.bit_errors += b;
        batch[j] = o;
      });
      for (std::size_t j = 0; j < count; ++j) {
        pt.bit_errors += batch[j].bit_errors;
        pt.block_errors += batch[j].bit_errors > 0 ? 1 : 0;
        pt.bits_simulated += n;
        pt.blocks_simulated += 1;
        iteration_sum += batch[j].iterations;
        if (pt.block_errors >= stop.block_errors) {
          done = true;
          break;
        }
      }
    }
    pt.capped = pt.block_errors < stop.block_errors;
    pt.upper_bound = pt.block_errors == 0;
    pt.ber = static_cast<double>(pt.bit_errors) / pt.bits_simulated;
    pt.bler = static_cast<double>(pt.block_errors) / pt.blocks_simulated;
    pt.ber_ci = wilson(pt.bit_errors, pt.bits_simulated);
    pt.bler_ci = wilson(pt.block_errors, pt.blocks_simulated);
    pt.mean_iterations = iteration_sum / pt.blocks_simulated;
    out.push_back(pt);
  }
  return out;
}

}  // namespace noisyldpc::harness
