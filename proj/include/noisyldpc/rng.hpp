#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace noisyldpc {

/// SplitMix64 finalizer; mixes a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of an independent substream identified by a path of indices, e.g.
/// derive_seed(seed, {snr_index, block_index}). Pure function of its inputs
/// so parallel work can be scheduled in any order.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(base);
  for (auto p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

/// Seeded generator. Each worker owns one; never shared between threads.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) : engine_(derive_seed(seed, path)) {}

  /// Standard normal draw.
  double normal() { return normal_(engine_); }
  double normal(double mean, double stddev) { return mean + stddev * normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  void fill_normal(std::span<double> out, double mean = 0.0, double stddev = 1.0) {
    for (auto& x : out) x = mean + stddev * normal_(engine_);
  }

  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
};

}  // namespace noisyldpc
