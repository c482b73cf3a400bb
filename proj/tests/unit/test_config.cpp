#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "noisyldpc/config.hpp"

using namespace noisyldpc;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("noisyldpc-config-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Key named by the ConfigError thrown from f, or "" if none.
template <class F>
std::string failing_key(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("parsing") {
  const auto cfg = Config::parse(R"(
# comment
kind = threshold
sigma2_d = 0, 1,2 ,3   # trailing comment
[decoder]
max_iterations = 40
)");
  CHECK(cfg.get_string("kind") == "threshold");
  CHECK(cfg.get_doubles("sigma2_d") == std::vector<double>{0, 1, 2, 3});
  CHECK(cfg.get_int("decoder.max_iterations") == 40);
  CHECK(cfg.get_double("missing", 2.5) == 2.5);
  CHECK(Config::parse("x = 1:0.5:3").get_doubles("x") == std::vector<double>{1, 1.5, 2, 2.5, 3});
  CHECK(Config::parse("b = yes").get_bool("b", false));
  CHECK_FALSE(Config::parse("b = false").get_bool("b", true));
}

TEST_CASE("errors name the offending key") {
  CHECK(failing_key([] { Config::parse("a = 1\na = 2"); }) == "a");
  CHECK(failing_key([] { Config::parse("n = abc").get_double("n"); }) == "n");
  CHECK(failing_key([] { Config::parse("n = 2.5").get_int("n"); }) == "n");
  CHECK(failing_key([] { Config::parse("x = 1,,2").get_doubles("x"); }) == "x");
  CHECK(failing_key([] { Config::parse("").get_string("snr_db"); }) == "snr_db");
  CHECK(failing_key([] { Config::parse("a = 1\njust words"); }) == "<config>:2");
  CHECK(failing_key([] { run_experiment(Config::parse("kind = threshold\ndv = 3\ndc = 6\nsigma2_d = 0\nsnr = 3")); }) ==
        "snr");
  CHECK(failing_key([] { run_experiment(Config::parse("kind = nonsense")); }) == "kind");
  CHECK(failing_key([] { run_experiment(Config::parse("kind = threshold\ndv = 3\ndc = 6")); }) == "sigma2_d");
  CHECK(failing_key([] { run_experiment(Config::parse("kind = exit\nlambda = 2:0.6,3:0.6\nrho = 6:1\nsnr_db = 1")); }) ==
        "distribution");
  CHECK(failing_key([] { run_experiment(Config::parse("kind = threshold\ndv = 3\ndc = 6\nsigma2_d=0\nmethod = x")); }) ==
        "method");
  CHECK(failing_key([] { Config::load("/nonexistent/file.cfg"); }) == "/nonexistent/file.cfg");
}

TEST_CASE("polynomials and distributions") {
  const auto p = parse_polynomial("2:0.5, 4:0.5");
  REQUIRE(p.size() == 2);
  CHECK(p[1].degree == 4);
  CHECK(p[1].fraction == 0.5);
  CHECK_THROWS(parse_polynomial("2-0.5"));
  CHECK(distribution_from(Config::parse("dv = 3\ndc = 6")) == DegreeDistribution::regular(3, 6));

  const auto dir = scratch("dist");
  std::ofstream(dir / "d.json") << R"({"lambda":[[2,0.384],[3,0.042],[4,0.574]],"rho":[[5,0.241],[6,0.759]]})";
  auto cfg = Config::parse("distribution = " + (dir / "d.json").string());
  CHECK(distribution_from(cfg).lambda().size() == 3);
  fs::remove_all(dir);
}

TEST_CASE("threshold experiment writes a table and a manifest") {
  const auto dir = scratch("threshold");
  std::ofstream(dir / "t.cfg") << "kind = threshold\nname = thresholds\ndv = 3\ndc = 6\n"
                                  "sigma2_d = 0,1,2,3\nmethod = quadrature\n";
  RunOptions opts;
  opts.out = dir.string();
  opts.seed = 7;
  const auto out = run_config(dir / "t.cfg", opts);
  REQUIRE(out.files.size() == 1);
  const auto rows = lines(slurp(out.files[0]));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "sigma2_d,snr_th_db,sigma_n_th");
  const std::vector<double> expect = {1.163, 2.835, 3.635, 4.185};
  for (int k = 0; k < 4; ++k) {
    const double snr = std::stod(rows[k + 1].substr(rows[k + 1].find(',') + 1));
    CHECK(std::abs(snr - expect[k]) < 0.1);
  }

  const auto m = nlohmann::json::parse(slurp(out.manifest));
  CHECK(m["kind"] == "threshold");
  CHECK(m["seed"] == 7);
  CHECK(m["parameters"]["sigma2_d"] == "0,1,2,3");
  CHECK(m["outputs"][0] == "thresholds.csv");
  CHECK(m["wall_time_s"].get<double>() >= 0.0);
  CHECK(m.contains("version"));
  fs::remove_all(dir);
}

TEST_CASE("ber experiment writes one row per point and is reproducible") {
  const auto dir = scratch("ber");
  const std::string text =
      "kind = ber\ndv = 3\ndc = 6\nn = 204\nsnr_db = 1.0, 2.0\nsigma2_d = 0, 1\n"
      "block_errors = 5\nmax_bits = 20400\nthreads = 2\nout = " +
      dir.string() + "\n";
  const auto a = run_experiment(Config::parse(text));
  const auto rows = lines(slurp(a.files[0]));
  CHECK(rows.size() == 5);
  CHECK(rows[0].rfind("snr_db,sigma2_d,bit_errors", 0) == 0);
  const std::string first = slurp(a.files[0]);
  RunOptions one;
  one.threads = 1;
  run_experiment(Config::parse(text), one);
  CHECK(slurp(a.files[0]) == first);
  fs::remove_all(dir);
}

TEST_CASE("construct and exit experiments") {
  const auto dir = scratch("construct");
  RunOptions opts;
  opts.out = dir.string();
  opts.cache_dir = (dir / "cache").string();
  const auto g = run_experiment(Config::parse("kind = construct\ndv = 3\ndc = 6\nn = 96\nname = g"), opts);
  CHECK(g.files[0].filename() == "g.alist");
  const auto b = run_experiment(
      Config::parse("kind = ber\nalist = " + g.files[0].string() + "\nsnr_db = 3\nblock_errors = 1\nmax_bits = 960"),
      opts);
  CHECK(lines(slurp(b.files[0])).size() == 2);

  const std::string ex = "kind = exit\ndv = 3\ndc = 6\nsnr_db = 1\ntrials = 2000\ngrid_step = 0.1\n";
  const auto e = run_experiment(Config::parse(ex), opts);
  const auto rows = lines(slurp(e.files[0]));
  CHECK(rows.size() == 11);
  CHECK(rows[0] == "i_a,i_e_variable,i_e_check");
  const std::string cold = slurp(e.files[0]);
  run_experiment(Config::parse(ex), opts);
  CHECK(slurp(e.files[0]) == cold);
  std::size_t cached = 0;
  for ([[maybe_unused]] const auto& f : fs::directory_iterator(dir / "cache")) ++cached;
  CHECK(cached == 2);
  fs::remove_all(dir);
}
