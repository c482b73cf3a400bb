import json
import math

import pytest

import noisyldpc as nl


def test_distribution_round_trip():
    d = nl.DegreeDistribution([(2, 0.384), (3, 0.042), (4, 0.574)], nl.two_term_check(5, 0.241))
    assert d.validate() == []
    assert abs(d.rate() - 0.5) < 1e-3
    back = nl.DegreeDistribution.from_json(d.to_json())
    assert back == d
    assert json.loads(d.to_json())["lambda"][0] == [2, 0.384]
    assert nl.DegreeDistribution.regular(3, 6).rate() == pytest.approx(0.5)


def test_j_function():
    assert nl.j_fun(1.0) == pytest.approx(0.160747219796417, abs=1e-11)
    for s in (0.5, 2.0, 7.0):
        assert nl.j_inv(nl.j_fun(s)) == pytest.approx(s, abs=1e-6)
    with pytest.raises(ValueError):
        nl.j_inv(1.0)


def test_consistent_density_identity():
    for m in (0.1, 1.0, 10.0):
        assert abs(nl.f_mean(m, 2 * m) - nl.g_mean(m, 2 * m)) < 1e-9


def test_quadrature_threshold():
    th = nl.de_threshold(nl.DegreeDistribution.regular(3, 6), 0.0, method="quadrature")
    assert abs(th - 1.163) < 0.1
    assert nl.de_converges(nl.DegreeDistribution.regular(3, 6), th + 0.05, method="quadrature")


def test_graph_and_decoder():
    g = nl.construct(nl.DegreeDistribution.regular(3, 6), 96, seed=2)
    assert (g.n_vars, g.n_checks, g.n_edges) == (96, 48, 288)
    assert nl.TannerGraph.from_alist(g.to_alist()) == g
    r = nl.decode(g, [20.0] * 96)
    assert r["success"] and sum(r["hard_bits"]) == 0
    with pytest.raises(nl.ParseError):
        nl.TannerGraph.from_alist("not an alist")


def test_exit_curves():
    grid = [0.0, 0.5, 0.9]
    v = nl.nvnd_curve(3, 3.0, grid=grid, trials=20000)
    c = nl.ncnd_curve(6, grid=grid, trials=20000)
    assert v.kind == "variable" and c.degree == 6
    assert abs(v.ie[0] - 0.720) < 0.02
    assert all(0.0 <= x <= 1.0 for x in v.ie + c.ie)
    assert len(nl.tunnel_slack(v, c)) == 2


def test_ber_is_thread_independent():
    g = nl.construct(nl.DegreeDistribution.regular(3, 6), 204, seed=3)
    a = nl.ber_sim(g, [1.5], sigma2_d=0.5, block_errors=5, max_bits=204 * 100, seed=4, threads=1)
    b = nl.ber_sim(g, [1.5], sigma2_d=0.5, block_errors=5, max_bits=204 * 100, seed=4, threads=2)
    assert a == b
    assert a[0]["ber"] == a[0]["bit_errors"] / a[0]["bits_simulated"]


def test_small_design():
    r = nl.design(sigma2_d=0.0, alpha_grid_size=5, delta_db=0.2, initial_snr_db=2.0, trials=5000)
    d = r["dist"]
    assert d.validate() == []
    assert abs(d.rate() - 0.5) < 1e-6
    assert r["trace"][-1]["feasible"] is False


def test_run_config(tmp_path):
    cfg = tmp_path / "t.cfg"
    cfg.write_text("kind = threshold\ndv = 3\ndc = 6\nsigma2_d = 0, 1\nmethod = quadrature\n")
    out = nl.run_config(str(cfg), out=str(tmp_path), seed=3)
    rows = out["files"][0].read_text().splitlines()
    assert rows[0] == "sigma2_d,snr_th_db,sigma_n_th" and len(rows) == 3
    manifest = json.loads(out["manifest"].read_text())
    assert manifest["seed"] == 3 and manifest["kind"] == "threshold"

    bad = tmp_path / "bad.cfg"
    bad.write_text("kind = threshold\ndv = 3\ndc = 6\nsigma2_d = 0\nbogus = 1\n")
    with pytest.raises(nl.ConfigError, match="bogus"):
        nl.run_config(str(bad), out=str(tmp_path))
