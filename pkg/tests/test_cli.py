import json
import math

import numpy as np
import pytest

from fractalkit import cli
from fractalkit import io as fio
from fractalkit.cantor import CantorSpec, cantor_integral, cantor_sample
from fractalkit.hausdorff import cloud_hausdorff_brute
from fractalkit.measure import box_counts, content_upper_bound, dimension_fit
from fractalkit.metric import FiniteMetricSpace
from fractalkit.realline import MonotoneFn, maximal_superlevel, stieltjes_integral


def run(capsys, *args):
    code = cli.main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *args):
    code, out, err = run(capsys, *args)
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def cantor12(tmp_path):
    p = tmp_path / "cantor12.csv"
    fio.write_points(p, cantor_sample(CantorSpec.constant(1 / 3), 12))
    return p


def test_dim_matches_library(capsys, cantor12):
    rep = report(capsys, "dim", "--input", cantor12, "--scales", "geometric:1,0.5,12", "--alpha-fit")
    scales = [0.5 ** k for k in range(12)]
    fit = dimension_fit(scales, box_counts(fio.read_point_cloud(cantor12), scales))
    assert rep["result"]["slope"] == fit.slope
    assert rep["result"]["slope"] == pytest.approx(math.log(2) / math.log(3), abs=0.05)
    assert rep["subcommand"] == "dim" and rep["parameters"]["seed"] == 0


def test_dim_csv_table(capsys, cantor12, tmp_path):
    table = tmp_path / "dim.csv"
    report(capsys, "dim", "--input", cantor12, "--scales", "geometric:0.3333333333333333,0.3333333333333333,8",
           "--table", table)
    lines = table.read_text().splitlines()
    assert lines[0] == "scale,count,log_inv_scale,log_count" and len(lines) == 9


def test_dim_low_r2_warns(capsys, tmp_path):
    p = tmp_path / "pts.csv"
    fio.write_points(p, np.random.default_rng(0).uniform(size=(40, 2)))
    rep = report(capsys, "dim", "--input", p, "--scales", "list:4,2,1,0.01,0.005,0.0025")
    assert any("r^2" in w for w in rep["warnings"]) and not rep["result"]["reliable"]


def test_hdist(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    rng = np.random.default_rng(1)
    P, Q = rng.normal(size=(30, 2)), rng.normal(size=(20, 2))
    fio.write_points(a, P)
    fio.write_points(b, Q)
    rep = report(capsys, "hdist", a, b)
    want = cloud_hausdorff_brute(P, Q)
    assert rep["result"] == {"distance": want.distance, "argmax_pair": list(want.argmax_pair)}
    assert report(capsys, "hdist", a, b, "--accelerated")["result"] == rep["result"]


def test_content_greedy_warns(capsys, tmp_path):
    p = tmp_path / "g.csv"
    fio.write_points(p, np.linspace(0, 1, 101))
    rep = report(capsys, "content", "--input", p, "--alpha", 1, "--delta", 0.1, "--mode", "greedy")
    sp = FiniteMetricSpace.euclidean(fio.read_point_cloud(p))
    assert rep["result"]["value"] == content_upper_bound(sp, sp.all(), 1, 0.1, "greedy").value
    assert any("greedy" in w for w in rep["warnings"])


def test_cantor_rejects_ratio(capsys, tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text('{"prefix": [], "tail": 0.6}')
    code, _, err = run(capsys, "cantor", "gen", "--spec", spec, "--depth", 3)
    assert code == 2 and "ratio must be < 1/2" in err


def test_cantor_integrate(capsys, tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text('{"tail": 0.25}')
    rep = report(capsys, "cantor", "integrate", "--spec", spec, "--depth", 10, "--f", "x**2")
    assert rep["result"]["value"] == cantor_integral(CantorSpec.constant(0.25), lambda x: x ** 2, 10)


def test_triangle_violation_named(capsys, tmp_path):
    m = tmp_path / "m.csv"
    m.write_text("0,1,5\n1,0,1\n5,1,0\n")
    code, _, err = run(capsys, "components", "--input", m, "--matrix", "--eps", 2)
    assert code == 2 and "triangle" in err


def test_malformed_csv_names_line(capsys, tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("0,1\n2,x\n")
    code, _, err = run(capsys, "components", "--input", p)
    assert code == 2 and "line 2" in err


def test_unknown_subcommand(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 2 and "usage" in err


def test_nonconvergence_exit_code(capsys, tmp_path):
    mu = tmp_path / "mu.json"
    mu.write_text(json.dumps({"nodes": [[0, 0, 0], [1, 1, 1]]}))
    code, _, err = run(capsys, "stieltjes", "--mu", mu, "--f", "sin(1/(abs(x-0.25)+1e-300))",
                       "--a", 0, "--b", 1, "--tol", 1e-14)
    assert code == 3


def test_stieltjes_and_maximal(capsys, tmp_path):
    mu = tmp_path / "mu.json"
    mu.write_text(json.dumps({"nodes": [[0, 0, 0], [1, 1, 1]]}))
    rep = report(capsys, "stieltjes", "--mu", mu, "--f", "x**2", "--a", 0, "--b", 1)
    assert rep["result"]["value"] == stieltjes_integral(lambda x: x ** 2, MonotoneFn.clamp(), 0, 1)
    table = tmp_path / "scan.csv"
    rep = report(capsys, "maximal", "--mu", mu, "--t", 0.5, "--scan=-1,2,7", "--table", table)
    assert rep["result"] == json.loads(json.dumps(maximal_superlevel(MonotoneFn.clamp(), 0.5).to_json()))
    assert table.read_text().splitlines()[0] == "x,mu_star"
    assert any("lower bound" in w for w in rep["warnings"])


def test_fn_fourier(capsys, tmp_path):
    f = tmp_path / "l.json"
    f.write_text(json.dumps({"domain": "Z^n", "n": 1, "atoms": [[[0], 0.5], [[1], 0.5]]}))
    rep = report(capsys, "fn", "fourier", "--functional", f, "--w", 0.5)
    assert rep["result"]["abs"] == pytest.approx(0.0, abs=1e-15)


def test_determinism(capsys, cantor12, tmp_path):
    args = ["dim", "--input", cantor12, "--scales", "geometric:1,0.5,10"]
    out1 = tmp_path / "o1.json"
    out2 = tmp_path / "o2.json"
    assert cli.main([str(a) for a in args + ["--output", out1]]) == 0
    assert cli.main([str(a) for a in args + ["--output", out2]]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    env = json.loads(out1.read_text())
    assert list(env) == sorted(env) and len(env["input_digest"]) == 64


def test_expression_parser_rejects_attributes():
    with pytest.raises(Exception):
        fio.parse_expression("x.__class__")
    with pytest.raises(Exception):
        fio.parse_expression("__import__('os')")
    assert fio.parse_expression("sqrt(x) + pi")(4.0) == pytest.approx(2 + math.pi)
