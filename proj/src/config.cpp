#include "noisyldpc/config.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "noisyldpc/cache.hpp"
#include "noisyldpc/de.hpp"
#include "noisyldpc/design.hpp"
#include "noisyldpc/exit.hpp"
#include "noisyldpc/graph.hpp"
#include "noisyldpc/harness.hpp"

namespace noisyldpc {

namespace fs = std::filesystem;
using nlohmann::json;

ConfigError::ConfigError(std::string key, const std::string& what)
    : std::runtime_error("config key '" + key + "': " + what), key_(std::move(key)) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool to_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [p, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw ConfigError(where, "malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2)) + ".";
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value'");
    const std::string key = section + trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || key == section) throw ConfigError(where, "missing key");
    if (cfg.values_.count(key)) throw ConfigError(key, "set twice (" + where + ")");
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "required but missing");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  double v;
  if (!to_double(get_string(key), v)) throw ConfigError(key, "expected a number, got '" + get_string(key) + "'");
  return v;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  const double v = get_double(key);
  if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError(key, "expected an integer");
  return static_cast<long long>(v);
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key, "expected a boolean");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split(get_string(key), ',')) {
    const auto parts = split(item, ':');
    double a, step, b;
    if (parts.size() == 1 && to_double(parts[0], a)) {
      out.push_back(a);
    } else if (parts.size() == 3 && to_double(parts[0], a) && to_double(parts[1], step) &&
               to_double(parts[2], b) && step > 0.0) {
      const long long count = static_cast<long long>(std::floor((b - a) / step + 1e-9));
      for (long long k = 0; k <= count; ++k) out.push_back(a + k * step);
    } else {
      throw ConfigError(key, "bad list item '" + item + "'");
    }
  }
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? get_doubles(key) : fallback;
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_)
    if (!allowed.count(k)) throw ConfigError(k, "unknown key");
}

EdgePolynomial parse_polynomial(std::string_view text) {
  EdgePolynomial poly;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    double d, f;
    if (parts.size() != 2 || !to_double(parts[0], d) || !to_double(parts[1], f) || d != std::floor(d))
      throw std::invalid_argument("polynomial term '" + item + "' is not 'degree:fraction'");
    poly.push_back({static_cast<int>(d), f});
  }
  return poly;
}

DegreeDistribution distribution_from(const Config& cfg) {
  DegreeDistribution dist;
  if (cfg.has("distribution")) {
    std::ifstream in(cfg.get_string("distribution"));
    if (!in) throw ConfigError("distribution", "cannot open " + cfg.get_string("distribution"));
    try {
      dist = json::parse(in).get<DegreeDistribution>();
    } catch (const std::exception& e) {
      throw ConfigError("distribution", e.what());
    }
  } else if (cfg.has("lambda") || cfg.has("rho")) {
    EdgePolynomial lam, rho;
    try {
      lam = parse_polynomial(cfg.get_string("lambda"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("lambda", e.what());
    }
    try {
      rho = parse_polynomial(cfg.get_string("rho"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("rho", e.what());
    }
    dist = DegreeDistribution(lam, rho);
  } else {
    dist = DegreeDistribution::regular(static_cast<int>(cfg.get_int("dv")), static_cast<int>(cfg.get_int("dc")));
  }
  if (const auto problems = validate(dist); !problems.empty()) throw ConfigError("distribution", problems.front());
  return dist;
}

namespace {

const std::set<std::string> kCommonKeys = {"kind", "seed", "threads", "cache_dir", "out", "name"};
const std::set<std::string> kDistKeys = {"distribution", "lambda", "rho", "dv", "dc"};

std::set<std::string> keys_for(const std::string& kind) {
  std::set<std::string> k = kCommonKeys;
  auto add = [&](std::initializer_list<const char*> names) {
    for (auto n : names) k.insert(n);
  };
  if (kind == "threshold") {
    k.insert(kDistKeys.begin(), kDistKeys.end());
    add({"sigma2_d", "tol_db", "mc_samples", "max_iterations", "convergence_mean", "method"});
  } else if (kind == "exit") {
    k.insert(kDistKeys.begin(), kDistKeys.end());
    add({"snr_db", "rate", "sigma2_d", "trials", "grid_step"});
  } else if (kind == "design") {
    add({"rate", "dc", "dv_max", "variable_degrees", "sigma2_d", "delta_db", "M", "margin", "initial_snr_db",
         "trials", "grid_step"});
  } else if (kind == "ber") {
    k.insert(kDistKeys.begin(), kDistKeys.end());
    add({"alist", "n", "graph_seed", "cleanup_passes", "snr_db", "sigma2_d", "max_iterations", "llr_clamp",
         "early_stop", "block_errors", "max_bits"});
  } else if (kind == "construct") {
    k.insert(kDistKeys.begin(), kDistKeys.end());
    add({"n", "cleanup_passes"});
  } else {
    throw ConfigError("kind", "unknown experiment kind '" + kind + "'");
  }
  return k;
}

std::vector<double> grid_from(const Config& cfg) {
  const double step = cfg.get_double("grid_step", 0.01);
  if (!(step > 0.0 && step < 1.0)) throw ConfigError("grid_step", "must lie in (0, 1)");
  std::vector<double> g;
  for (long long k = 0; k * step < 1.0 - 1e-12; ++k) g.push_back(std::round(k * step * 1e12) / 1e12);
  return g;
}

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

struct Context {
  const Config& cfg;
  std::uint64_t seed;
  int threads;
  fs::path out_dir;
  std::string name;
  std::string cache_dir;
  RunOutputs outputs;

  fs::path file(const std::string& ext) {
    fs::path p = out_dir / (name + ext);
    outputs.files.push_back(p);
    return p;
  }
};

TannerGraph graph_from(const Config& cfg, std::uint64_t seed) {
  if (cfg.has("alist")) {
    std::ifstream in(cfg.get_string("alist"));
    if (!in) throw ConfigError("alist", "cannot open " + cfg.get_string("alist"));
    std::stringstream ss;
    ss << in.rdbuf();
    return from_alist(ss.str());
  }
  const auto dist = distribution_from(cfg);
  const auto n = cfg.get_int("n");
  if (n < 1) throw ConfigError("n", "must be positive");
  const auto graph_seed = static_cast<std::uint64_t>(cfg.get_int("graph_seed", static_cast<long long>(seed)));
  TannerGraph g = construct(dist, static_cast<int>(n), graph_seed);
  const auto passes = cfg.get_int("cleanup_passes", 100);
  if (passes > 0) g = remove_four_cycles(g, static_cast<int>(passes), graph_seed).graph;
  return g;
}

void run_threshold(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto dist = distribution_from(cfg);
  de::DEParams params;
  params.mc_samples = static_cast<std::size_t>(cfg.get_int("mc_samples", 100000));
  params.max_iterations = static_cast<int>(cfg.get_int("max_iterations", 2000));
  params.convergence_mean = cfg.get_double("convergence_mean", 50.0);
  params.seed = ctx.seed;
  const std::string method = cfg.get_string("method", "monte_carlo");
  if (method == "quadrature")
    params.method = de::CheckMethod::quadrature;
  else if (method != "monte_carlo")
    throw ConfigError("method", "expected monte_carlo or quadrature");
  const double tol = cfg.get_double("tol_db", 0.01);

  std::string csv = "sigma2_d,snr_th_db,sigma_n_th\n";
  for (double s2 : cfg.get_doubles("sigma2_d")) {
    const auto th = de::threshold(dist, s2, tol, params);
    csv += fmt(s2) + "," + fixed(th.snr_db, 3) + "," + fixed(th.sigma_n, 4) + "\n";
  }
  write_text(ctx.file(".csv"), csv);
}

void run_exit(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto dist = distribution_from(cfg);
  const double snr = cfg.get_double("snr_db");
  const double r = cfg.get_double("rate", rate(dist));
  const double s2 = cfg.get_double("sigma2_d", 0.0);
  const auto trials = static_cast<std::size_t>(cfg.get_int("trials", 100000));
  const auto grid = grid_from(cfg);
  auto cache = CurveCache::open(ctx.cache_dir);

  auto curves = [&](const EdgePolynomial& poly, exit::NodeKind kind) {
    std::vector<exit::ExitCurve> cs;
    std::vector<double> w;
    for (const auto& t : poly) {
      const bool var = kind == exit::NodeKind::variable;
      const std::uint64_t s = derive_seed(ctx.seed, {var ? 0x76u : 0x63u, static_cast<std::uint64_t>(t.degree)});
      exit::CurveMeta meta{kind, t.degree, var ? std::optional<double>(snr) : std::nullopt, var ? r : 0.0, s2,
                           trials, s};
      auto compute = [&] {
        return var ? exit::nvnd_curve(t.degree, snr, r, s2, grid, trials, s, ctx.threads)
                   : exit::ncnd_curve(t.degree, s2, grid, trials, s, ctx.threads);
      };
      cs.push_back(cache ? cache->get_or_compute(meta, grid, compute) : compute());
      w.push_back(t.fraction);
    }
    return exit::effective_curve(cs, w);
  };
  const auto v = curves(dist.lambda(), exit::NodeKind::variable);
  const auto c = curves(dist.rho(), exit::NodeKind::check);

  std::string csv = "i_a,i_e_variable,i_e_check\n";
  for (std::size_t k = 0; k < grid.size(); ++k) csv += fmt(grid[k]) + "," + fmt(v.ie[k]) + "," + fmt(c.ie[k]) + "\n";
  write_text(ctx.file(".csv"), csv);
}

void run_design(Context& ctx) {
  const auto& cfg = ctx.cfg;
  design::DesignSpec spec;
  spec.rate = cfg.get_double("rate", spec.rate);
  spec.dc = static_cast<int>(cfg.get_int("dc", spec.dc));
  spec.dv_max = static_cast<int>(cfg.get_int("dv_max", spec.dv_max));
  for (double d : cfg.get_doubles("variable_degrees", {})) spec.variable_degrees.push_back(static_cast<int>(d));
  spec.sigma2_d = cfg.get_double("sigma2_d", 0.0);
  spec.delta_db = cfg.get_double("delta_db", spec.delta_db);
  spec.alpha_grid_size = static_cast<int>(cfg.get_int("M", spec.alpha_grid_size));
  spec.margin = cfg.get_double("margin", spec.margin);
  if (cfg.has("initial_snr_db")) spec.initial_snr_db = cfg.get_double("initial_snr_db");
  spec.trials = static_cast<std::size_t>(cfg.get_int("trials", static_cast<long long>(spec.trials)));
  spec.grid = grid_from(cfg);
  spec.seed = ctx.seed;
  spec.threads = ctx.threads;
  auto cache = CurveCache::open(ctx.cache_dir);
  const auto res = design::design_code(spec, cache ? &*cache : nullptr);

  json j;
  j["distribution"] = res.dist;
  j["snr_th_db"] = res.snr_th_db;
  j["alpha"] = res.alpha;
  j["slack"] = res.slack;
  j["rate"] = rate(res.dist);
  j["sigma2_d"] = spec.sigma2_d;
  json trace = json::array();
  for (const auto& t : res.trace) {
    json lam = json::array();
    for (const auto& term : t.lambda) lam.push_back({term.degree, term.fraction});
    trace.push_back({{"snr_db", t.snr_db}, {"feasible", t.feasible}, {"alpha", t.alpha}, {"slack", t.slack},
                     {"lambda", lam}});
  }
  j["trace"] = trace;
  write_text(ctx.file(".json"), j.dump(2) + "\n");

  std::ostringstream txt;
  txt << "sigma2_d      " << spec.sigma2_d << "\n"
      << "threshold     " << fixed(res.snr_th_db, 2) << " dB\n"
      << "alpha         " << fixed(res.alpha, 2) << "\n"
      << "lambda(x)     " << to_string(res.dist.lambda()) << "\n"
      << "rho(x)        " << to_string(res.dist.rho()) << "\n"
      << "rate          " << fixed(rate(res.dist), 4) << "\n"
      << "tunnel slack  " << fmt(res.slack, 3) << "\n";
  write_text(ctx.file(".txt"), txt.str());
}

void run_ber(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const TannerGraph g = graph_from(cfg, ctx.seed);
  DecoderConfig dec;
  dec.max_iterations = static_cast<int>(cfg.get_int("max_iterations", 80));
  dec.llr_clamp = cfg.get_double("llr_clamp", 30.0);
  dec.early_stop = cfg.get_bool("early_stop", true);
  harness::StopRule stop;
  stop.block_errors = static_cast<std::size_t>(cfg.get_int("block_errors", 50));
  stop.max_bits = static_cast<std::size_t>(cfg.get_int("max_bits", 10'000'000));
  const auto snrs = cfg.get_doubles("snr_db");

  std::string csv =
      "snr_db,sigma2_d,bit_errors,block_errors,bits_simulated,blocks_simulated,ber,bler,ber_ci_low,ber_ci_high,"
      "capped\n";
  const auto noise = cfg.get_doubles("sigma2_d", {0.0});
  for (std::size_t i = 0; i < noise.size(); ++i) {
    const std::uint64_t seed = derive_seed(ctx.seed, {0x626572, i});
    for (const auto& p : harness::ber_sim(g, snrs, noise[i], stop, dec, seed, ctx.threads)) {
      csv += fmt(p.snr_db) + "," + fmt(p.sigma2_d) + "," + std::to_string(p.bit_errors) + "," +
             std::to_string(p.block_errors) + "," + std::to_string(p.bits_simulated) + "," +
             std::to_string(p.blocks_simulated) + "," + fmt(p.ber) + "," + fmt(p.bler) + "," + fmt(p.ber_ci.lo) +
             "," + fmt(p.ber_ci.hi) + "," + (p.capped ? "1" : "0") + "\n";
    }
  }
  write_text(ctx.file(".csv"), csv);
}

void run_construct(Context& ctx) {
  const TannerGraph g = graph_from(ctx.cfg, ctx.seed);
  write_text(ctx.file(".alist"), to_alist(g));
}

}  // namespace

RunOutputs run_experiment(Config cfg, const RunOptions& overrides) {
  if (overrides.seed) cfg.set("seed", std::to_string(*overrides.seed));
  if (overrides.threads) cfg.set("threads", std::to_string(*overrides.threads));
  if (!overrides.cache_dir.empty()) cfg.set("cache_dir", overrides.cache_dir);
  if (!overrides.out.empty()) cfg.set("out", overrides.out);

  const std::string kind = cfg.get_string("kind");
  cfg.require_known(keys_for(kind));

  const auto seed_value = cfg.get_int("seed", 1);
  if (seed_value < 0) throw ConfigError("seed", "must be non-negative");
  const auto threads = cfg.get_int("threads", 1);
  if (threads < 0) throw ConfigError("threads", "must be non-negative");
  Context ctx{cfg, static_cast<std::uint64_t>(seed_value), static_cast<int>(threads), cfg.get_string("out", "."),
              cfg.get_string("name", kind), cfg.get_string("cache_dir", ""), {}};
  fs::create_directories(ctx.out_dir);

  const auto start = std::chrono::steady_clock::now();
  if (kind == "threshold")
    run_threshold(ctx);
  else if (kind == "exit")
    run_exit(ctx);
  else if (kind == "design")
    run_design(ctx);
  else if (kind == "ber")
    run_ber(ctx);
  else
    run_construct(ctx);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest;
  manifest["kind"] = kind;
  manifest["parameters"] = cfg.values();
  manifest["source"] = cfg.source();
  manifest["seed"] = ctx.seed;
  manifest["threads"] = ctx.threads;
  manifest["version"] = NOISYLDPC_VERSION;
  manifest["wall_time_s"] = wall;
  json files = json::array();
  for (const auto& f : ctx.outputs.files) files.push_back(f.filename().string());
  manifest["outputs"] = files;
  ctx.outputs.manifest = ctx.out_dir / (ctx.name + ".manifest.json");
  write_text(ctx.outputs.manifest, manifest.dump(2) + "\n");
  return ctx.outputs;
}

RunOutputs run_config(const fs::path& path, const RunOptions& overrides) {
  return run_experiment(Config::load(path), overrides);
}

}  // namespace noisyldpc
