// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--report FILE] [--only 1,4,5] [--xfail 8] [--threads N]
//
// Criteria listed in --xfail are still run and reported; a failure there is
// printed as XFAIL and does not change the exit status.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "noisyldpc/channel.hpp"
#include "noisyldpc/de.hpp"
#include "noisyldpc/decoder.hpp"
#include "noisyldpc/design.hpp"
#include "noisyldpc/exit.hpp"
#include "noisyldpc/graph.hpp"
#include "noisyldpc/harness.hpp"
#include "noisyldpc/rng.hpp"

using namespace noisyldpc;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (ok ? "  ok   " : "  FAIL ") << what << "\n";
  }
};

std::string num(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

int g_threads = 1;

// ---------------------------------------------------------------------------
// Shared fixtures; computed on first use so --only works for any subset.

const std::vector<double>& grid() {
  static const auto g = exit::default_grid();
  return g;
}

struct RegularCurves {
  exit::ExitCurve v, c;
};

const RegularCurves& regular_curves(double s2) {
  static std::map<double, RegularCurves> memo;
  auto it = memo.find(s2);
  if (it == memo.end()) {
    RegularCurves f;
    f.v = exit::nvnd_curve(3, 3.0, 0.5, s2, grid(), 100000, derive_seed(1, {0x76, 3}), g_threads);
    f.c = exit::ncnd_curve(6, s2, grid(), 100000, derive_seed(1, {0x63, 6}), g_threads);
    it = memo.emplace(s2, std::move(f)).first;
  }
  return it->second;
}

const design::DesignResult& designed(double s2, bool two_four_only = false) {
  static std::map<std::pair<double, bool>, design::DesignResult> memo;
  auto key = std::make_pair(s2, two_four_only);
  auto it = memo.find(key);
  if (it == memo.end()) {
    design::DesignSpec spec;
    spec.sigma2_d = s2;
    spec.threads = g_threads;
    if (two_four_only) spec.variable_degrees = {2, 4};
    it = memo.emplace(key, design::design_code(spec)).first;
  }
  return it->second;
}

TannerGraph build_graph(const DegreeDistribution& dist, int n, std::uint64_t seed) {
  return remove_four_cycles(construct(dist, n, seed), 100, seed).graph;
}

// ---------------------------------------------------------------------------

void reference_thresholds(Outcome& o) {
  const double expect[] = {1.163, 2.835, 3.635, 4.185};
  for (int s2 = 0; s2 <= 3; ++s2) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto th = de::threshold(DegreeDistribution::regular(3, 6), s2, 0.01, de::DEParams{});
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.expect(std::abs(th.snr_db - expect[s2]) <= 0.1, "sigma2_d=" + std::to_string(s2) + ": " +
                                                          num(th.snr_db, 4) + " dB vs " + num(expect[s2], 4) +
                                                          " (" + num(sec, 3) + " s)");
    o.expect(sec <= 600.0, "runtime under 10 min");
  }
}

// Composite Simpson, independent of the library's quadrature.
double simpson_tanh(double m, double var, int power) {
  const int n = 400000;
  const double a = -14.0, b = 14.0, h = (b - a) / n, s = std::sqrt(var);
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double z = a + k * h;
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * std::exp(-0.5 * z * z) * std::pow(std::tanh((m + s * z) / 2), power);
  }
  return acc * h / 3.0 / std::sqrt(2.0 * M_PI);
}

void consistency(Outcome& o) {
  for (double m : {0.1, 1.0, 2.0, 5.0, 10.0}) {
    const double f = de::f_mean(m, 2 * m), g = de::g_mean(m, 2 * m);
    const double fq = simpson_tanh(m, 2 * m, 1), gq = simpson_tanh(m, 2 * m, 2);
    o.expect(std::abs(f - g) < 1e-9 && std::abs(fq - gq) < 1e-9 && std::abs(f - fq) < 1e-9,
             "m=" + num(m) + ": |f-g|=" + num(std::abs(f - g), 2) + ", oracle |f-g|=" + num(std::abs(fq - gq), 2));
  }
}

void inconsistency(Outcome& o) {
  const DegreeDistribution d({{2, 0.25}, {3, 0.25}, {4, 0.2}, {8, 0.3}}, {{7, 1.0}});
  const double sn = snr_db_to_sigma_n(1.0, 0.5);
  de::GaussianState st;
  st.m_u = 2.0;
  st.var_u = 4.0;
  for (double s2 : {0.5, 1.0, 3.0}) {
    const auto v = de::variable_step(st, d, {sn * sn, s2});
    for (std::size_t j = 0; j < v.size(); ++j) {
      const int dv = d.lambda()[j].degree;
      const double gap = v[j].variance - 2 * v[j].mean;
      o.expect(std::abs(gap - (dv - 1) * s2) < 1e-12,
               "dv=" + std::to_string(dv) + " sigma2_d=" + num(s2) + ": var-2m=" + num(gap, 8));
    }
  }
}

void tunnels(Outcome& o) {
  for (int s2 = 0; s2 <= 3; ++s2) {
    const auto& f = regular_curves(s2);
    const auto slack = exit::tunnel_slack(f.v, f.c);
    const double worst = *std::min_element(slack.begin(), slack.end());
    const bool open = exit::tunnel_open(f.v, f.c, 1e-3);
    const bool want = s2 <= 1;
    o.expect(open == want, "sigma2_d=" + std::to_string(s2) + ": " + (open ? "open" : "closed") +
                               " (min slack " + num(worst, 3) + ")");
  }
}

void intercepts(Outcome& o) {
  const double v0 = regular_curves(0).v.ie[0], v1 = regular_curves(1).v.ie[0];
  o.expect(std::abs(v0 - 0.720) <= 0.01, "sigma2_d=0: " + num(v0) + " vs 0.720");
  o.expect(std::abs(v1 - 0.645) <= 0.01, "sigma2_d=1: " + num(v1) + " vs 0.645");
}

void closed_form(Outcome& o) {
  const auto& v = regular_curves(0).v;
  double worst = 0.0;
  for (std::size_t k = 0; k < v.grid.size(); ++k)
    worst = std::max(worst, std::abs(v.ie[k] - exit::vnd_closed_form(3, 3.0, 0.5, v.grid[k])));
  o.expect(worst <= 0.01, "max |MC - closed form| = " + num(worst, 3) + " over " + std::to_string(v.grid.size()) +
                              " grid points");
}

void finite_length(Outcome& o) {
  const auto g = build_graph(DegreeDistribution::regular(3, 6), 1008, 1);
  const harness::StopRule stop{50, 1'000'000'000};
  DecoderConfig cfg;
  cfg.max_iterations = 80;
  const auto a = harness::ber_sim(g, {2.5}, 0.0, stop, cfg, 25, g_threads, 0.5)[0];
  o.expect(a.ber >= 1.8e-6 && a.ber <= 1.8e-4, "(2.5 dB, 0): BER " + num(a.ber, 3) + " vs 1.8e-5 (x10), " +
                                                   std::to_string(a.block_errors) + " block errors in " +
                                                   std::to_string(a.blocks_simulated) + " blocks");
  // Reference BER of the sigma2_d = 3 curve: 10^-0.664 at 2.0 dB, 10^-1.321 at 4.0 dB.
  const auto b = harness::ber_sim(g, {2.0, 4.0}, 3.0, stop, cfg, 20, g_threads, 0.5);
  const double ref2 = std::pow(10.0, -0.664), ref4 = std::pow(10.0, -1.321);
  o.expect(b[0].ber >= ref2 / 2 && b[0].ber <= ref2 * 2,
           "(2.0 dB, 3): BER " + num(b[0].ber, 3) + " vs " + num(ref2, 3) + " (x2)");
  o.expect(b[1].ber >= ref4 / 2 && b[1].ber <= ref4 * 2,
           "(4.0 dB, 3): BER " + num(b[1].ber, 3) + " vs " + num(ref4, 3) + " (x2)");
}

std::string describe(const design::DesignResult& r) {
  return num(r.snr_th_db, 3) + " dB, alpha " + num(r.alpha, 3) + ", lambda " + to_string(r.dist.lambda());
}

bool matches(const design::DesignResult& r, double l2, double l4, double alpha) {
  const auto& lam = r.dist.lambda();
  if (lam.size() != 2 || lam[0].degree != 2 || lam[1].degree != 4) return false;
  return std::abs(lam[0].fraction - l2) <= 0.08 && std::abs(lam[1].fraction - l4) <= 0.08 &&
         std::abs(r.alpha - alpha) <= 0.08;
}

void design_repro(Outcome& o) {
  const auto& r0 = designed(0.0);
  o.expect(std::abs(r0.snr_th_db - 0.8085) <= 0.15, "sigma2_d=0: " + describe(r0) + " (target 0.8085 dB)");
  const auto& a = designed(0.5);
  o.expect(matches(a, 0.453, 0.547, 0.451), "sigma2_d=0.5: " + describe(a) + " (code A: 0.453/0.547, alpha 0.451)");
  const auto& b = designed(1.0);
  o.expect(matches(b, 0.4808, 0.5192, 0.553),
           "sigma2_d=1: " + describe(b) + " (code B: 0.4808/0.5192, alpha 0.553)");
  // Diagnostic only: the same search restricted to degrees {2, 4}.
  o.detail << "  info {2,4} support, sigma2_d=0.5: " << describe(designed(0.5, true)) << "\n";
  o.detail << "  info {2,4} support, sigma2_d=1: " << describe(designed(1.0, true)) << "\n";
}

void robustness(Outcome& o) {
  const DegreeDistribution bench({{2, 0.384}, {3, 0.042}, {4, 0.574}}, two_term_check(5, 0.241));
  const auto gb = build_graph(bench, 10000, 7);
  const harness::StopRule stop{50, 200'000'000};
  DecoderConfig cfg;
  cfg.max_iterations = 80;

  struct Case {
    double s2, snr;
  };
  for (const Case c : {Case{0.5, 1.9}, Case{1.0, 2.4}}) {
    const auto gd = build_graph(designed(c.s2).dist, 10000, 7);
    const auto d = harness::ber_sim(gd, {c.snr}, c.s2, stop, cfg, 91, g_threads, 0.5)[0];
    const auto b = harness::ber_sim(gb, {c.snr}, c.s2, stop, cfg, 92, g_threads, 0.5)[0];
    const std::string what = "sigma2_d=" + num(c.s2) + " at " + num(c.snr) + " dB: designed " + num(d.ber, 3) +
                             " [" + num(d.ber_ci.lo, 3) + ", " + num(d.ber_ci.hi, 3) + "] vs benchmark " +
                             num(b.ber, 3) + " [" + num(b.ber_ci.lo, 3) + ", " + num(b.ber_ci.hi, 3) + "]";
    if (c.s2 == 0.5)
      o.expect(d.ber_ci.hi < b.ber_ci.lo, what + ", needs disjoint intervals");
    else
      o.expect(10.0 * d.ber <= b.ber, what + ", needs a 10x gap");
  }
  // Diagnostic only: the reference codes A and B through the same simulator.
  const DegreeDistribution code_a({{2, 0.453}, {4, 0.547}}, two_term_check(5, 0.451));
  const DegreeDistribution code_b({{2, 0.4808}, {4, 0.5192}}, two_term_check(5, 0.553));
  const auto pa = harness::ber_sim(build_graph(code_a, 10000, 7), {1.9}, 0.5, stop, cfg, 91, g_threads, 0.5)[0];
  const auto pb = harness::ber_sim(build_graph(code_b, 10000, 7), {2.4}, 1.0, stop, cfg, 91, g_threads, 0.5)[0];
  o.detail << "  info reference code A, sigma2_d=0.5 at 1.9 dB: BER " << num(pa.ber, 3) << "\n";
  o.detail << "  info reference code B, sigma2_d=1 at 2.4 dB: BER " << num(pb.ber, 3) << "\n";
}

// Exact bitwise posterior LLRs by enumerating all codewords.
std::vector<double> brute_posterior(const TannerGraph& g, const std::vector<double>& llr) {
  const int n = g.n_vars();
  std::vector<double> p0(n, 0.0), p1(n, 0.0);
  std::vector<std::uint8_t> bits(n);
  for (long w = 0; w < (1L << n); ++w) {
    double logp = 0.0;
    for (int v = 0; v < n; ++v) {
      bits[v] = (w >> v) & 1;
      if (bits[v]) logp -= llr[v];
    }
    if (!syndrome_ok(g, bits)) continue;
    for (int v = 0; v < n; ++v) (bits[v] ? p1[v] : p0[v]) += std::exp(logp);
  }
  std::vector<double> out(n);
  for (int v = 0; v < n; ++v) out[v] = std::log(p0[v] / p1[v]);
  return out;
}

void properties(Outcome& o) {
  {
    const std::vector<std::vector<int>> checks = {{0, 1, 2}, {2, 3, 4}, {4, 5, 6}, {1, 7, 8}, {3, 9}, {6, 10, 11}};
    std::vector<Edge> e;
    for (int c = 0; c < 6; ++c)
      for (int v : checks[c]) e.push_back({v, c});
    const TannerGraph tree(12, 6, e);
    Rng rng(3);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      std::vector<double> llr(12);
      for (auto& x : llr) x = rng.normal(0.8, 1.5);
      DecoderConfig cfg;
      cfg.max_iterations = 30;
      cfg.early_stop = false;
      cfg.llr_clamp = 1e3;
      const auto res = decode(tree, llr, cfg, rng);
      const auto exact = brute_posterior(tree, llr);
      for (int v = 0; v < 12; ++v) worst = std::max(worst, std::abs(res.final_llrs[v] - exact[v]));
    }
    o.expect(worst < 1e-9, "tree decoding equals brute-force marginals (max diff " + num(worst, 2) + ")");
  }

  const auto g = build_graph(DegreeDistribution::regular(3, 6), 504, 5);
  {
    int successes = 0, violations = 0;
    DecoderConfig cfg;
    cfg.sigma2_d = 0.5;
    for (int k = 0; k < 50; ++k) {
      Rng rng(17, {static_cast<std::uint64_t>(k)});
      const auto llr = transmit_all_one(504, snr_db_to_sigma_n(2.0, 0.5), rng);
      const auto res = decode(g, llr, cfg, rng);
      successes += res.success;
      violations += res.success && !syndrome_ok(g, res.hard_bits);
    }
    o.expect(violations == 0 && successes > 0,
             "syndrome holds on all " + std::to_string(successes) + " successful decodes of 50");
  }
  o.expect(from_alist(to_alist(g)) == g, "alist round trip of a 504-bit graph");
  {
    bool mono = true, inv = true;
    double prev = -1.0;
    for (double s = 0.0; s <= 10.0; s += 0.01) {
      const double j = exit::j_fun(s);
      mono = mono && j > prev;
      inv = inv && std::abs(exit::j_inv(j) - s) < 1e-6;
      prev = j;
    }
    o.expect(mono, "J strictly increasing on [0, 10]");
    o.expect(inv, "J^-1(J(s)) = s within 1e-6 on [0, 10]");
  }
  {
    de::DEParams p;
    p.method = de::CheckMethod::quadrature;
    double prev = -100.0;
    bool mono = true;
    std::string seq;
    for (double s2 = 0.0; s2 <= 3.0; s2 += 0.5) {
      const double th = de::threshold(DegreeDistribution::regular(3, 6), s2, 0.01, p).snr_db;
      mono = mono && th >= prev;
      prev = th;
      seq += num(th, 4) + " ";
    }
    o.expect(mono, "DE threshold nondecreasing in sigma2_d: " + seq);
  }
  {
    const harness::StopRule stop{10, 504 * 300};
    const auto a = harness::ber_sim(g, {1.5}, 1.0, stop, {}, 4, 1)[0];
    const auto b = harness::ber_sim(g, {1.5}, 1.0, stop, {}, 4, 3)[0];
    const auto ca = exit::ncnd_curve(6, 1.0, grid(), 5000, 8, 1);
    const auto cb = exit::ncnd_curve(6, 1.0, grid(), 5000, 8, 2);
    de::DEParams p;
    p.mc_samples = 20000;
    const auto ra = de::run(DegreeDistribution::regular(3, 6), {0.8, 0.5}, p);
    const auto rb = de::run(DegreeDistribution::regular(3, 6), {0.8, 0.5}, p);
    const bool same = a.bit_errors == b.bit_errors && a.blocks_simulated == b.blocks_simulated && ca.ie == cb.ie &&
                      ra.iterations == rb.iterations && ra.state.m_u == rb.state.m_u;
    o.expect(same, "BER, EXIT and DE replay identically under fixed seeds");
  }
}

struct Criterion {
  int id;
  std::string title;
  std::function<void(Outcome&)> run;
};

std::set<int> parse_ids(const std::string& s) {
  std::set<int> ids;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) ids.insert(std::stoi(item));
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  std::string report;
  std::set<int> only, xfail;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto value = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << a << " needs a value\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (a == "--report")
      report = value();
    else if (a == "--only")
      only = parse_ids(value());
    else if (a == "--xfail")
      xfail = parse_ids(value());
    else if (a == "--threads")
      g_threads = std::stoi(value());
    else {
      std::cerr << "unknown argument " << a << "\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "reference DE thresholds for (3,6)", reference_thresholds},
      {2, "f = g on consistent densities", consistency},
      {3, "inconsistency after a noisy variable step", inconsistency},
      {4, "EXIT tunnel states at 3 dB", tunnels},
      {5, "EXIT variable-curve intercepts", intercepts},
      {6, "noiseless EXIT matches closed form", closed_form},
      {7, "finite-length BER of the (3,6) code", finite_length},
      {8, "robust design reproduction", design_repro},
      {9, "designed codes beat the benchmark", robustness},
      {10, "property suites", properties},
  };

  std::ostringstream full;
  bool ok = true;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string status = o.pass ? "PASS" : "FAIL";
    if (!o.pass && xfail.count(c.id)) status = "XFAIL";
    if (!o.pass && !xfail.count(c.id)) ok = false;
    char line[256];
    std::snprintf(line, sizeof line, "criterion %2d %-5s %s (%.1f s)", c.id, status.c_str(), c.title.c_str(), sec);
    std::cout << line << "\n" << o.detail.str() << std::flush;
    full << line << "\n" << o.detail.str();
  }
  if (!report.empty()) std::ofstream(report) << full.str();
  return ok ? 0 : 1;
}
