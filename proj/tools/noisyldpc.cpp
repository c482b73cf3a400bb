#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "noisyldpc/config.hpp"
#include "noisyldpc/graph.hpp"

using namespace noisyldpc;

namespace {

struct Subcommand {
  std::string kind;
  CLI::App* app = nullptr;
  std::string config_file;
  std::map<std::string, std::string> values;  // config key -> flag value

  void key(const std::string& flag, const std::string& cfg_key, const std::string& help) {
    app->add_option(flag, values[cfg_key], help);
  }

  Config build() const {
    Config cfg = config_file.empty() ? Config() : Config::load(config_file);
    for (const auto& [k, v] : values)
      if (!v.empty()) cfg.set(k, v);
    cfg.set("kind", kind);
    return cfg;
  }
};

void add_distribution_keys(Subcommand& s) {
  s.key("--dist", "distribution", "degree distribution JSON file");
  s.key("--lambda", "lambda", "variable edge polynomial, e.g. \"2:0.45,4:0.55\"");
  s.key("--rho", "rho", "check edge polynomial, e.g. \"5:0.45,6:0.55\"");
  s.key("--dv", "dv", "regular variable degree");
  s.key("--dc", "dc", "regular check degree");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy LDPC decoding: density evolution, EXIT charts, code design and BER simulation"};
  app.require_subcommand(1);

  RunOptions opts;
  std::uint64_t seed = 0;
  int threads = 0;
  auto* seed_opt = app.add_option("--seed", seed, "base random seed");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_option("--cache-dir", opts.cache_dir, "EXIT curve cache directory (default: $NOISYLDPC_CACHE_DIR)");
  app.add_option("--out", opts.out, "output directory");

  std::vector<std::unique_ptr<Subcommand>> subs;
  auto make = [&](const std::string& name, const std::string& kind, const std::string& help) {
    auto s = std::make_unique<Subcommand>();
    s->kind = kind;
    s->app = app.add_subcommand(name, help);
    s->app->add_option("--config", s->config_file, "key-value config file; flags override its entries");
    s->key("--name", "name", "output file stem");
    subs.push_back(std::move(s));
    return subs.back().get();
  };

  auto* construct = make("construct", "construct", "build a Tanner graph and write it as alist");
  add_distribution_keys(*construct);
  construct->key("--n", "n", "block length");
  construct->key("--cleanup-passes", "cleanup_passes", "4-cycle removal passes (0 disables)");

  auto* threshold = make("threshold", "threshold", "density-evolution thresholds (CSV)");
  add_distribution_keys(*threshold);
  threshold->key("--sigma2-d", "sigma2_d", "decoder noise variances, e.g. \"0,1,2,3\"");
  threshold->key("--tol-db", "tol_db", "bisection resolution in dB");
  threshold->key("--mc-samples", "mc_samples", "Monte-Carlo samples per check step");
  threshold->key("--method", "method", "monte_carlo or quadrature");

  auto* exitc = make("exit-curves", "exit", "effective EXIT curves of a code (CSV)");
  add_distribution_keys(*exitc);
  exitc->key("--snr-db", "snr_db", "channel Eb/N0 in dB");
  exitc->key("--rate", "rate", "code rate for the SNR conversion");
  exitc->key("--sigma2-d", "sigma2_d", "decoder noise variance");
  exitc->key("--trials", "trials", "LLR samples per grid point");
  exitc->key("--grid-step", "grid_step", "a-priori information step");

  auto* design = make("design", "design", "robust degree-distribution design (JSON + summary)");
  design->key("--rate", "rate", "target rate");
  design->key("--dc", "dc", "check degrees dc and dc+1");
  design->key("--dv-max", "dv_max", "largest variable degree");
  design->key("--variable-degrees", "variable_degrees", "explicit variable degrees, e.g. \"2,4\"");
  design->key("--sigma2-d", "sigma2_d", "decoder noise variance");
  design->key("--delta-db", "delta_db", "SNR step");
  design->key("--alpha-grid", "M", "alpha grid size");
  design->key("--margin", "margin", "tunnel margin");
  design->key("--initial-snr-db", "initial_snr_db", "starting SNR");
  design->key("--trials", "trials", "LLR samples per grid point");

  auto* ber = make("ber", "ber", "Monte-Carlo BER simulation (CSV)");
  add_distribution_keys(*ber);
  ber->key("--alist", "alist", "parity-check matrix in alist format");
  ber->key("--n", "n", "block length when constructing a graph");
  ber->key("--graph-seed", "graph_seed", "construction seed (default: --seed)");
  ber->key("--snr-db", "snr_db", "SNR points, e.g. \"1.5,2.0\" or \"1:0.25:3\"");
  ber->key("--sigma2-d", "sigma2_d", "decoder noise variances");
  ber->key("--max-iterations", "max_iterations", "decoder iterations");
  ber->key("--block-errors", "block_errors", "block errors per point");
  ber->key("--max-bits", "max_bits", "bit budget per point");

  std::string run_file;
  auto* run = app.add_subcommand("run", "run an experiment described by a config file");
  run->add_option("config", run_file, "config file")->required();

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) opts.seed = seed;
  if (*threads_opt) opts.threads = threads;

  try {
    RunOutputs out;
    if (*run) {
      out = run_config(run_file, opts);
    } else {
      for (const auto& s : subs)
        if (*s->app) out = run_experiment(s->build(), opts);
    }
    for (const auto& f : out.files) std::cout << f.string() << "\n";
    std::cout << out.manifest.string() << "\n";
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "alist parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
