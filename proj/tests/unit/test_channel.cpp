#include <cmath>

#include "doctest.h"
#include "noisyldpc/channel.hpp"
#include "noisyldpc/rng.hpp"

using namespace noisyldpc;
using doctest::Approx;

TEST_CASE("SNR to channel noise conversion") {
  CHECK(snr_db_to_sigma_n(1.163, 0.5) == Approx(0.8746).epsilon(2e-4));
  CHECK(snr_db_to_sigma_n(2.835, 0.5) == Approx(0.7216).epsilon(2e-4));
  CHECK(snr_db_to_sigma_n(0.0, 0.5) == Approx(1.0).epsilon(1e-15));
  CHECK(sigma_n_to_snr_db(snr_db_to_sigma_n(2.4, 0.4), 0.4) == Approx(2.4).epsilon(1e-12));
  CHECK_THROWS(snr_db_to_sigma_n(1.0, 0.0));
  CHECK_THROWS(snr_db_to_sigma_n(1.0, 1.0));
}

TEST_CASE("conversion is strictly decreasing in SNR and in rate") {
  for (double s = -2; s < 10; s += 0.5) CHECK(snr_db_to_sigma_n(s + 0.5, 0.5) < snr_db_to_sigma_n(s, 0.5));
  for (double r = 0.1; r < 0.9; r += 0.1) CHECK(snr_db_to_sigma_n(1.0, r + 0.1) < snr_db_to_sigma_n(1.0, r));
}

TEST_CASE("LLR statistics") {
  const auto a = llr_stats(1.0);
  CHECK(a.mean == 2.0);
  CHECK(a.variance == 4.0);
  const auto b = llr_stats(0.8744);
  CHECK(b.mean == Approx(2.616).epsilon(1e-3));
  CHECK(b.variance == Approx(5.232).epsilon(1e-3));
  for (double s : {0.3, 0.7, 1.0, 1.9}) {
    const auto st = llr_stats(s);
    CHECK(st.variance == 2.0 * st.mean);
  }
}

TEST_CASE("received LLRs follow N(m0, 2 m0)") {
  Rng rng(42);
  const auto y = transmit_all_one(1'000'000, 1.0, rng);
  double mean = 0, var = 0, neg = 0;
  for (double v : y) mean += v;
  mean /= y.size();
  for (double v : y) {
    var += (v - mean) * (v - mean);
    neg += v < 0;
  }
  var /= y.size();
  CHECK(mean == Approx(2.0).epsilon(0.005));
  CHECK(var == Approx(4.0).epsilon(0.0125));
  CHECK(var / mean == Approx(2.0).epsilon(0.01));
  // Sign errors match the Gaussian tail Q(1 / sigma_n).
  const double q1 = 0.5 * std::erfc(1.0 / std::sqrt(2.0));
  CHECK(std::abs(neg / y.size() - q1) < 0.002);
  CHECK(q_function(1.0) == Approx(0.158655253931457).epsilon(1e-12));
}

TEST_CASE("vanishing channel noise drives LLRs to large positive values") {
  Rng rng(1);
  for (double v : transmit_all_one(1000, 1e-3, rng)) CHECK(v > 1e5);
}

TEST_CASE("transmission is deterministic for a seed") {
  Rng a(9, {1, 2}), b(9, {1, 2}), c(9, {1, 3});
  const auto x = transmit_all_one(100, 0.8, a);
  CHECK(x == transmit_all_one(100, 0.8, b));
  CHECK(x != transmit_all_one(100, 0.8, c));
}
