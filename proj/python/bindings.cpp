#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "json.hpp"
#include "noisyldpc/config.hpp"
#include "noisyldpc/de.hpp"
#include "noisyldpc/decoder.hpp"
#include "noisyldpc/design.hpp"
#include "noisyldpc/exit.hpp"
#include "noisyldpc/graph.hpp"
#include "noisyldpc/harness.hpp"

namespace py = pybind11;
using namespace noisyldpc;

namespace {

using Pairs = std::vector<std::pair<int, double>>;

EdgePolynomial to_poly(const Pairs& p) {
  EdgePolynomial out;
  for (auto [d, f] : p) out.push_back({d, f});
  return out;
}

Pairs to_pairs(const EdgePolynomial& p) {
  Pairs out;
  for (const auto& t : p) out.emplace_back(t.degree, t.fraction);
  return out;
}

py::dict point_dict(const harness::BerPoint& p) {
  py::dict d;
  d["snr_db"] = p.snr_db;
  d["sigma2_d"] = p.sigma2_d;
  d["bit_errors"] = p.bit_errors;
  d["block_errors"] = p.block_errors;
  d["bits_simulated"] = p.bits_simulated;
  d["blocks_simulated"] = p.blocks_simulated;
  d["ber"] = p.ber;
  d["bler"] = p.bler;
  d["ber_ci"] = py::make_tuple(p.ber_ci.lo, p.ber_ci.hi);
  d["bler_ci"] = py::make_tuple(p.bler_ci.lo, p.bler_ci.hi);
  d["mean_iterations"] = p.mean_iterations;
  d["capped"] = p.capped;
  d["upper_bound"] = p.upper_bound;
  return d;
}

de::CheckMethod method_from(const std::string& m) {
  if (m == "monte_carlo") return de::CheckMethod::monte_carlo;
  if (m == "quadrature") return de::CheckMethod::quadrature;
  throw py::value_error("method must be 'monte_carlo' or 'quadrature'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Noisy LDPC decoding: density evolution, EXIT charts, code design and BER simulation";
  m.attr("__version__") = NOISYLDPC_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<de::DEError>(m, "DEError", PyExc_RuntimeError);
  py::register_exception<design::DesignError>(m, "DesignError", PyExc_RuntimeError);

  py::class_<DegreeDistribution>(m, "DegreeDistribution")
      .def(py::init([](const Pairs& lambda, const Pairs& rho) {
             return DegreeDistribution(to_poly(lambda), to_poly(rho));
           }),
           py::arg("lambda_"), py::arg("rho"))
      .def_static("regular", &DegreeDistribution::regular, py::arg("dv"), py::arg("dc"))
      .def_static("from_json",
                  [](const std::string& text) { return nlohmann::json::parse(text).get<DegreeDistribution>(); })
      .def_property_readonly("lambda_", [](const DegreeDistribution& d) { return to_pairs(d.lambda()); })
      .def_property_readonly("rho", [](const DegreeDistribution& d) { return to_pairs(d.rho()); })
      .def("rate", [](const DegreeDistribution& d) { return rate(d); })
      .def("validate", [](const DegreeDistribution& d) { return validate(d); })
      .def("to_json", [](const DegreeDistribution& d) { return nlohmann::json(d).dump(); })
      .def("__eq__", [](const DegreeDistribution& a, const DegreeDistribution& b) { return a == b; })
      .def("__repr__", [](const DegreeDistribution& d) {
        return "DegreeDistribution(lambda=" + to_string(d.lambda()) + ", rho=" + to_string(d.rho()) + ")";
      });

  m.def("two_term_check", [](int dc, double alpha) { return to_pairs(two_term_check(dc, alpha)); },
        py::arg("dc"), py::arg("alpha"));

  py::class_<TannerGraph>(m, "TannerGraph")
      .def_property_readonly("n_vars", &TannerGraph::n_vars)
      .def_property_readonly("n_checks", &TannerGraph::n_checks)
      .def_property_readonly("n_edges", &TannerGraph::n_edges)
      .def("edges",
           [](const TannerGraph& g) {
             std::vector<std::pair<int, int>> out;
             for (const auto& e : g.edges()) out.emplace_back(e.var, e.check);
             return out;
           })
      .def("four_cycles", [](const TannerGraph& g) { return count_four_cycles(g); })
      .def("syndrome_ok", [](const TannerGraph& g, const std::vector<std::uint8_t>& bits) { return syndrome_ok(g, bits); })
      .def("to_alist", [](const TannerGraph& g) { return to_alist(g); })
      .def_static("from_alist", [](const std::string& text) { return from_alist(text); })
      .def("__eq__", [](const TannerGraph& a, const TannerGraph& b) { return a == b; });

  m.def(
      "construct",
      [](const DegreeDistribution& dist, int n, std::uint64_t seed, int cleanup_passes) {
        auto g = construct(dist, n, seed);
        return cleanup_passes > 0 ? remove_four_cycles(g, cleanup_passes, seed).graph : g;
      },
      py::arg("dist"), py::arg("n"), py::arg("seed") = 1, py::arg("cleanup_passes") = 100,
      "Random graph realizing dist on n variables, with 4-cycle removal.");

  m.def(
      "decode",
      [](const TannerGraph& g, const std::vector<double>& llrs, int max_iterations, double sigma2_d, double llr_clamp,
         bool early_stop, std::uint64_t seed) {
        DecoderConfig cfg{max_iterations, sigma2_d, llr_clamp, early_stop};
        Rng rng(seed);
        DecodeResult r;
        {
          py::gil_scoped_release release;
          r = decode(g, llrs, cfg, rng);
        }
        py::dict d;
        d["hard_bits"] = r.hard_bits;
        d["success"] = r.success;
        d["iterations_used"] = r.iterations_used;
        d["final_llrs"] = r.final_llrs;
        return d;
      },
      py::arg("graph"), py::arg("llrs"), py::arg("max_iterations") = 80, py::arg("sigma2_d") = 0.0,
      py::arg("llr_clamp") = 30.0, py::arg("early_stop") = true, py::arg("seed") = 1);

  m.def(
      "de_threshold",
      [](const DegreeDistribution& dist, double sigma2_d, double tol_db, const std::string& method,
         std::size_t mc_samples, std::uint64_t seed) {
        de::DEParams p;
        p.method = method_from(method);
        p.mc_samples = mc_samples;
        p.seed = seed;
        py::gil_scoped_release release;
        return de::threshold(dist, sigma2_d, tol_db, p).snr_db;
      },
      py::arg("dist"), py::arg("sigma2_d") = 0.0, py::arg("tol_db") = 0.01, py::arg("method") = "monte_carlo",
      py::arg("mc_samples") = 100000, py::arg("seed") = 1, "Decoding threshold Eb/N0 in dB.");

  m.def(
      "de_converges",
      [](const DegreeDistribution& dist, double snr_db, double sigma2_d, const std::string& method,
         std::size_t mc_samples, std::uint64_t seed) {
        de::DEParams p;
        p.method = method_from(method);
        p.mc_samples = mc_samples;
        p.seed = seed;
        py::gil_scoped_release release;
        return de::converges(dist, snr_db, sigma2_d, p);
      },
      py::arg("dist"), py::arg("snr_db"), py::arg("sigma2_d") = 0.0, py::arg("method") = "monte_carlo",
      py::arg("mc_samples") = 100000, py::arg("seed") = 1);

  m.def("f_mean", &de::f_mean, py::arg("m"), py::arg("var"));
  m.def("g_mean", &de::g_mean, py::arg("m"), py::arg("var"));
  m.def("j_fun", &exit::j_fun, py::arg("sigma"));
  m.def("j_inv", &exit::j_inv, py::arg("info"));

  py::class_<exit::ExitCurve>(m, "ExitCurve")
      .def_readonly("grid", &exit::ExitCurve::grid)
      .def_readonly("ie", &exit::ExitCurve::ie)
      .def_property_readonly("degree", [](const exit::ExitCurve& c) { return c.meta.degree; })
      .def_property_readonly("kind", [](const exit::ExitCurve& c) { return exit::to_string(c.meta.kind); });

  m.def("default_grid", &exit::default_grid);
  m.def(
      "nvnd_curve",
      [](int dv, double snr_db, double rate, double sigma2_d, std::optional<std::vector<double>> grid,
         std::size_t trials, std::uint64_t seed, int threads) {
        py::gil_scoped_release release;
        return exit::nvnd_curve(dv, snr_db, rate, sigma2_d, grid.value_or(exit::default_grid()), trials, seed,
                                threads);
      },
      py::arg("dv"), py::arg("snr_db"), py::arg("rate") = 0.5, py::arg("sigma2_d") = 0.0, py::arg("grid") = py::none(),
      py::arg("trials") = 100000, py::arg("seed") = 1, py::arg("threads") = 1);
  m.def(
      "ncnd_curve",
      [](int dc, double sigma2_d, std::optional<std::vector<double>> grid, std::size_t trials, std::uint64_t seed,
         int threads) {
        py::gil_scoped_release release;
        return exit::ncnd_curve(dc, sigma2_d, grid.value_or(exit::default_grid()), trials, seed, threads);
      },
      py::arg("dc"), py::arg("sigma2_d") = 0.0, py::arg("grid") = py::none(), py::arg("trials") = 100000,
      py::arg("seed") = 1, py::arg("threads") = 1);
  m.def(
      "effective_curve",
      [](const std::vector<exit::ExitCurve>& curves, const std::vector<double>& w) {
        return exit::effective_curve(curves, w);
      },
      py::arg("curves"), py::arg("weights"));
  m.def("tunnel_slack", &exit::tunnel_slack, py::arg("vcurve"), py::arg("ccurve"));
  m.def("tunnel_open", &exit::tunnel_open, py::arg("vcurve"), py::arg("ccurve"), py::arg("margin") = 1e-3);

  m.def(
      "design",
      [](double sigma2_d, int dc, int dv_max, std::vector<int> variable_degrees, double rate, double delta_db,
         int alpha_grid_size, double margin, std::optional<double> initial_snr_db, std::size_t trials,
         std::uint64_t seed, int threads, const std::string& cache_dir) {
        design::DesignSpec s;
        s.sigma2_d = sigma2_d;
        s.dc = dc;
        s.dv_max = dv_max;
        s.variable_degrees = std::move(variable_degrees);
        s.rate = rate;
        s.delta_db = delta_db;
        s.alpha_grid_size = alpha_grid_size;
        s.margin = margin;
        s.initial_snr_db = initial_snr_db;
        s.trials = trials;
        s.seed = seed;
        s.threads = threads;
        auto cache = CurveCache::open(cache_dir);
        design::DesignResult r;
        {
          py::gil_scoped_release release;
          r = design::design_code(s, cache ? &*cache : nullptr);
        }
        py::dict d;
        d["dist"] = r.dist;
        d["snr_th_db"] = r.snr_th_db;
        d["alpha"] = r.alpha;
        d["slack"] = r.slack;
        py::list trace;
        for (const auto& t : r.trace) {
          py::dict e;
          e["snr_db"] = t.snr_db;
          e["feasible"] = t.feasible;
          e["alpha"] = t.alpha;
          e["slack"] = t.slack;
          e["lambda"] = to_pairs(t.lambda);
          trace.append(e);
        }
        d["trace"] = trace;
        return d;
      },
      py::arg("sigma2_d") = 0.0, py::arg("dc") = 5, py::arg("dv_max") = 4, py::arg("variable_degrees") = std::vector<int>{},
      py::arg("rate") = 0.5, py::arg("delta_db") = 0.05, py::arg("alpha_grid_size") = 100, py::arg("margin") = 1e-3,
      py::arg("initial_snr_db") = py::none(), py::arg("trials") = 100000, py::arg("seed") = 1, py::arg("threads") = 1,
      py::arg("cache_dir") = "");

  m.def(
      "ber_sim",
      [](const TannerGraph& g, const std::vector<double>& snr_db, double sigma2_d, std::size_t block_errors,
         std::size_t max_bits, int max_iterations, std::uint64_t seed, int threads) {
        DecoderConfig cfg;
        cfg.max_iterations = max_iterations;
        std::vector<harness::BerPoint> pts;
        {
          py::gil_scoped_release release;
          pts = harness::ber_sim(g, snr_db, sigma2_d, {block_errors, max_bits}, cfg, seed, threads);
        }
        py::list out;
        for (const auto& p : pts) out.append(point_dict(p));
        return out;
      },
      py::arg("graph"), py::arg("snr_db"), py::arg("sigma2_d") = 0.0, py::arg("block_errors") = 50,
      py::arg("max_bits") = 10'000'000, py::arg("max_iterations") = 80, py::arg("seed") = 1, py::arg("threads") = 1);

  m.def(
      "run_config",
      [](const std::string& path, std::optional<std::uint64_t> seed, std::optional<int> threads,
         const std::string& cache_dir, const std::string& out) {
        RunOptions o{seed, threads, cache_dir, out};
        RunOutputs r;
        {
          py::gil_scoped_release release;
          r = run_config(path, o);
        }
        py::dict d;
        d["files"] = r.files;
        d["manifest"] = r.manifest;
        return d;
      },
      py::arg("path"), py::arg("seed") = py::none(), py::arg("threads") = py::none(), py::arg("cache_dir") = "",
      py::arg("out") = "", "Run the experiment described by a key-value config file.");
}
