"""Command-line front end.

Each subcommand runs one family of library operations and prints a JSON
report envelope.  Exit codes: 0 success, 2 bad input or violated
precondition, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import cantor as cz
from . import functionals as fz
from . import hausdorff as hz
from . import io as fio
from . import lipschitz as lz
from . import measure as mz
from . import metric as mt
from . import realline as rz
from .errors import NonConvergenceError, PreconditionError

EXIT_OK, EXIT_PRECONDITION, EXIT_NONCONVERGENCE = 0, 2, 3


@dataclass
class ReportEnvelope:
    subcommand: str
    parameters: dict
    input_digest: str
    result: object = None
    warnings: list[str] = field(default_factory=list)
    tables: dict[str, tuple[list[str], list]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "tool": "fractalkit",
            "version": __version__,
            "subcommand": self.subcommand,
            "input_digest": self.input_digest,
            "parameters": self.parameters,
            "result": self.result,
            "warnings": self.warnings,
        }


def _digest(paths) -> str:
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
        h.update(b"\0")
    return h.hexdigest()


def _clean(obj):
    """Make results JSON-safe: numpy scalars and arrays, infinities, tuples."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise PreconditionError(f"expected comma-separated numbers, got {text!r}") from None


def parse_scales(text: str) -> list[float]:
    """``geometric:START,RATIO,COUNT`` or ``list:s1,s2,...``."""
    kind, _, body = text.partition(":")
    vals = _floats(body)
    if kind == "geometric":
        if len(vals) != 3 or vals[2] != int(vals[2]) or vals[2] < 1:
            raise PreconditionError("geometric scales need START,RATIO,COUNT")
        start, ratio, count = vals[0], vals[1], int(vals[2])
        if not (start > 0 and 0 < ratio < 1):
            raise PreconditionError("geometric scales need START > 0 and 0 < RATIO < 1")
        return [start * ratio ** k for k in range(count)]
    if kind == "list":
        return vals
    raise PreconditionError(f"unknown scale schedule {text!r}")


def _delta(text: str) -> float:
    return math.inf if text in ("inf", "infinity") else float(text)


# ---- subcommand runners -------------------------------------------------

def run_dim(a, env: ReportEnvelope):
    points = fio.read_point_cloud(a.input)
    scales = parse_scales(a.scales)
    if a.method == "box":
        counts = mz.box_counts(points, scales)
    else:
        space = mt.FiniteMetricSpace.euclidean(points)
        if a.snowflake != 1.0:
            space = mt.with_snowflake(space, a.snowflake)
        counts = mz.covering_counts(space, space.all(), scales, "greedy")
        env.warnings.append("covering counts from greedy mode are upper bounds")
    fit = mz.dimension_fit(scales, counts)
    env.warnings.extend(fit.warnings)
    env.result = {"slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared,
                  "reliable": fit.reliable, "scales": fit.scales, "counts": fit.counts}
    env.tables["dimension"] = (["scale", "count", "log_inv_scale", "log_count"], fit.table())


def _space(a):
    return fio.read_space(a.input, matrix=a.matrix)


def _target(a, space):
    return fio.read_subset(a.subset) if a.subset else space.all()


def run_content(a, env):
    space = _space(a)
    E = _target(a, space)
    if a.deltas:
        profile = mz.measure_profile(space, E, a.alpha, _floats(a.deltas), a.mode, a.exact_limit)
        env.result = {"profile": [e.to_json() for e in profile]}
    else:
        env.result = mz.content_upper_bound(space, E, a.alpha, _delta(a.delta), a.mode, a.exact_limit).to_json()
    if a.mode == "greedy":
        env.warnings.append("greedy mode: values are upper bounds, not exact minima")
    env.warnings.append("only upper bounds are certified; no lower bound on the measure is computed")


def run_cover(a, env):
    space = _space(a)
    E = _target(a, space)
    est = mz.content_upper_bound(space, E, 0.0, _delta(a.delta), a.mode, a.exact_limit)
    env.result = {"covering_number": int(round(est.value)), "cover": est.to_json()}
    if a.mode == "greedy":
        env.warnings.append("greedy mode: covering number is an upper bound")


def run_cantor(a, env):
    spec = fio.read_cantor_spec(a.spec)
    if a.action == "gen":
        level = cz.cantor_levels(spec, a.depth)
        env.result = {"depth": a.depth, "count": len(level), "intervals": level.intervals}
        env.tables["levels"] = (["left", "right"], level.intervals)
        if a.sample:
            pts = cz.cantor_sample(spec, a.depth)
            env.tables["sample"] = (["x"], [(float(p),) for p in pts])
    elif a.action == "integrate":
        if not a.f:
            raise PreconditionError("cantor integrate needs --f")
        f = fio.parse_expression(a.f)
        env.result = {"value": cz.cantor_integral(spec, f, a.depth, a.node), "depth": a.depth}
    else:
        if not a.spec2:
            raise PreconditionError("cantor homeo needs --spec2")
        other = fio.read_cantor_spec(a.spec2)
        h = cz.cantor_homeomorphism(spec, other, a.depth)
        env.result = {"breakpoints": h.breakpoints}
        env.tables["homeo"] = (["x", "y"], h.breakpoints)


def run_hdist(a, env):
    if a.paths[0] == "seq":
        if len(a.paths) != 1 or not a.input or not a.sets:
            raise PreconditionError("usage: hdist seq --input CLOUD.csv --sets SETS.json")
        space = fio.read_space(a.input)
        limit, dists = hz.decreasing_limit(space, hz.SetSequence(tuple(fio.read_subsets(a.sets))))
        env.result = {"limit": list(limit), "distances": dists}
        return
    if len(a.paths) != 2:
        raise PreconditionError("hdist takes two point-cloud files")
    P, Q = (fio.read_point_cloud(p) for p in a.paths)
    res = hz.cloud_hausdorff(P, Q) if a.accelerated else hz.cloud_hausdorff_brute(P, Q)
    env.result = res.to_json()


def run_components(a, env):
    space = _space(a)
    if a.deltas:
        prof = mt.disconnectedness_profile(space, _floats(a.deltas))
        env.result = {"profile": [{"delta": d, "max_diameter": m} for d, m in prof]}
    else:
        comps = mt.epsilon_components(space, a.eps)
        env.result = {"eps": a.eps, "components": [list(c) for c in comps]}


def run_lip(a, env):
    space = _space(a)
    f = fio.read_sampled_function(a.function)
    if a.action == "extend":
        q = np.arange(space.n) if a.query is None else np.array(_floats(a.query), dtype=int)
        vals = lz.mcshane_extend(space, f, a.C, q)
        env.result = {"C": a.C, "query": q, "values": vals}
        env.tables["extension"] = (["index", "value"], list(zip(q.tolist(), np.asarray(vals).tolist())))
    elif a.action == "approx":
        q = np.arange(space.n) if a.query is None else np.array(_floats(a.query), dtype=int)
        vals = lz.inf_conv_approx(space, f, a.j, q)
        env.result = {"j": a.j, "query": q, "values": vals}
        env.tables["approximation"] = (["index", "value"], list(zip(q.tolist(), np.asarray(vals).tolist())))
    else:
        if not a.cover:
            raise PreconditionError("lip levelprofile needs --cover")
        prof = lz.level_profile(space, fio.read_subsets(a.cover), f, a.alpha, a.C, a.t)
        env.result = prof.to_json()


def run_stieltjes(a, env):
    mu = fio.read_monotone(a.mu)
    f = fio.parse_expression(a.f)
    env.result = {"value": rz.stieltjes_integral(f, mu, a.a, a.b, a.tol), "a": a.a, "b": a.b}


def run_variation(a, env):
    if a.pl:
        data = fio._numeric(a.pl)
        h = rz.PiecewiseLinear(data[:, 0], data[:, 1])
        est = rz.total_variation(h, a.a, a.b)
        env.result = {"value": est.value, "exact": est.exact}
        if a.jordan:
            g1, g2 = rz.jordan_decomposition(h, a.a, a.b)
            env.result["jordan"] = {"g1": g1.to_json(), "g2": g2.to_json()}
    else:
        if not a.f:
            raise PreconditionError("variation needs --f or --pl")
        turning = _floats(a.turning) if a.turning is not None else None
        est = rz.total_variation(fio.parse_expression(a.f), a.a, a.b,
                                 [int(v) for v in _floats(a.levels)], turning)
        env.result = {"estimates": est.estimates, "value": est.value, "exact": est.exact}
        if not est.exact:
            env.warnings.append("lower bound: turning points were not declared")


def run_maximal(a, env):
    mu = fio.read_monotone(a.mu)
    if a.t is not None:
        lo, hi, count = _floats(a.scan) if a.scan else (None, None, None)
        sup = rz.maximal_superlevel(mu, a.t)
        env.result = sup.to_json()
        if a.scan:
            xs = np.linspace(lo, hi, int(count))
            vals = [rz.maximal_function(mu, 1.0, float(x), a.depth).value for x in xs]
            env.tables["scan"] = (["x", "mu_star"], list(zip(xs.tolist(), vals)))
            env.warnings.append("mu_star scan values are lower bounds from a finite candidate grid")
        return
    if a.x is None:
        raise PreconditionError("maximal needs --x or --t")
    res = rz.maximal_function(mu, a.alpha, a.x, a.depth)
    env.result = {"value": res.value, "witness": res.witness.to_json() if res.witness else None,
                  "lower_bound": res.lower_bound}
    if res.lower_bound:
        env.warnings.append("lower bound of the supremum from a finite candidate grid")


def run_chebyshev(a, env):
    phi = fio.read_step_function(a.phi)
    env.result = rz.step_chebyshev(phi, a.t).to_json()


def _fn_space(a):
    return fio.read_space(a.space, matrix=a.matrix) if a.space else None


def run_fn(a, env):
    space = _fn_space(a)
    lam = fio.read_functional(a.functional, space)
    if a.action == "eval":
        f = fio.parse_expression(a.f)
        env.result = {"value": fz.evaluate(lam, f), "mass": lam.mass}
    elif a.action == "conv":
        if not a.functional2:
            raise PreconditionError("fn conv needs --functional2")
        other = fio.read_functional(a.functional2, space)
        env.result = fz.convolve(lam, other).to_json()
    elif a.action == "fourier":
        if a.w is None:
            raise PreconditionError("fn fourier needs --w")
        fv = fz.fourier(lam, _floats(a.w))
        env.result = {"w": fv.w, "value": fv.value, "abs": abs(fv.value), "mass": lam.mass}
    else:
        if not a.sequence or not a.tests:
            raise PreconditionError("fn weak needs --sequence and --tests")
        seq = [fio.functional_from_json(d, space) for d in json.loads(Path(a.sequence).read_text())]
        tests = [fio.parse_expression(s) for s in a.tests.split(";")]
        env.result = {"deviations": fz.weak_convergence_check(seq, lam, tests)}


RUNNERS = {
    "dim": run_dim, "content": run_content, "cover": run_cover, "cantor": run_cantor,
    "hdist": run_hdist, "components": run_components, "lip": run_lip,
    "stieltjes": run_stieltjes, "variation": run_variation, "maximal": run_maximal,
    "chebyshev": run_chebyshev, "fn": run_fn,
}

_INPUT_ARGS = ("input", "subset", "spec", "spec2", "function", "cover", "mu", "phi",
               "functional", "functional2", "space", "sequence", "sets", "pl")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write the JSON report here (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--table", help="write the result table as CSV here")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)

    p = argparse.ArgumentParser(prog="fractalkit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"fractalkit {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def space_args(sp):
        sp.add_argument("--input", required=True, help="point cloud CSV (or matrix CSV with --matrix)")
        sp.add_argument("--matrix", action="store_true")

    s = sub.add_parser("dim", parents=[common], help="box-counting or covering dimension fit")
    s.add_argument("--input", required=True)
    s.add_argument("--scales", required=True, help="geometric:START,RATIO,COUNT or list:s1,s2,...")
    s.add_argument("--method", choices=("box", "cover"), default="box")
    s.add_argument("--snowflake", type=float, default=1.0)
    s.add_argument("--alpha-fit", action="store_true", help="report the fitted exponent (always on)")

    for name in ("content", "cover"):
        s = sub.add_parser(name, parents=[common])
        space_args(s)
        s.add_argument("--subset")
        if name == "content":
            s.add_argument("--alpha", type=float, required=True)
            s.add_argument("--deltas", help="comma-separated decreasing schedule (profile)")
        s.add_argument("--delta", default="inf")
        s.add_argument("--mode", choices=mz.MODES, default="exact")
        s.add_argument("--exact-limit", type=int, default=None)

    s = sub.add_parser("cantor", parents=[common])
    s.add_argument("action", choices=("gen", "integrate", "homeo"))
    s.add_argument("--spec", required=True)
    s.add_argument("--spec2")
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--f")
    s.add_argument("--node", choices=("left", "right"), default="left")
    s.add_argument("--sample", action="store_true")

    s = sub.add_parser("hdist", parents=[common])
    s.add_argument("paths", nargs="+", help="A.csv B.csv, or 'seq'")
    s.add_argument("--accelerated", action="store_true")
    s.add_argument("--input")
    s.add_argument("--sets")

    s = sub.add_parser("components", parents=[common])
    space_args(s)
    s.add_argument("--eps", type=float, default=1.0)
    s.add_argument("--deltas")

    s = sub.add_parser("lip", parents=[common])
    s.add_argument("action", choices=("extend", "approx", "levelprofile"))
    space_args(s)
    s.add_argument("--function", required=True, help="CSV rows index,value")
    s.add_argument("--C", type=float, default=1.0)
    s.add_argument("--j", type=float, default=1.0)
    s.add_argument("--query")
    s.add_argument("--cover")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--t", type=float, default=1.0)

    s = sub.add_parser("stieltjes", parents=[common])
    s.add_argument("--mu", required=True)
    s.add_argument("--f", required=True)
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--b", type=float, required=True)
    s.add_argument("--tol", type=float, default=1e-9)

    s = sub.add_parser("variation", parents=[common])
    s.add_argument("--f")
    s.add_argument("--pl", help="CSV of x,y breakpoints of a piecewise-linear function")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--b", type=float, required=True)
    s.add_argument("--levels", default="2,4,6,8,10,12")
    s.add_argument("--turning")
    s.add_argument("--jordan", action="store_true")

    s = sub.add_parser("maximal", parents=[common])
    s.add_argument("--mu", required=True)
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--x", type=float)
    s.add_argument("--t", type=float)
    s.add_argument("--scan", help="LO,HI,COUNT grid for a mu_star table")
    s.add_argument("--depth", type=int, default=12)

    s = sub.add_parser("chebyshev", parents=[common])
    s.add_argument("--phi", required=True)
    s.add_argument("--t", type=float, required=True)

    s = sub.add_parser("fn", parents=[common])
    s.add_argument("action", choices=("eval", "conv", "fourier", "weak"))
    s.add_argument("--functional", required=True)
    s.add_argument("--functional2")
    s.add_argument("--space")
    s.add_argument("--matrix", action="store_true")
    s.add_argument("--f")
    s.add_argument("--w")
    s.add_argument("--sequence")
    s.add_argument("--tests", help="semicolon-separated expressions in x")
    return p


def dispatch(args) -> ReportEnvelope:
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("output", "format", "table", "subcommand") and v is not None}
    paths = [getattr(args, k) for k in _INPUT_ARGS if getattr(args, k, None)]
    if args.subcommand == "hdist" and args.paths[0] != "seq":
        paths = list(args.paths) + paths
    try:
        digest = _digest(paths)
    except OSError as exc:
        raise PreconditionError(f"cannot read input: {exc}") from None
    env = ReportEnvelope(args.subcommand, _clean(params), digest)
    RUNNERS[args.subcommand](args, env)
    env.result = _clean(env.result)
    return env


def emit_report(env: ReportEnvelope, fmt: str = "json", output=None, table=None) -> str:
    text = json.dumps(env.to_json(), sort_keys=True, indent=2) + "\n"
    csv_text = None
    if env.tables:
        name = sorted(env.tables)[0]
        header, rows = env.tables[name]
        csv_text = fio.table_csv(header, rows)
    if table and csv_text is not None:
        Path(table).write_text(csv_text)
    out = csv_text if fmt == "csv" and csv_text is not None else text
    if output:
        Path(output).write_text(out)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        env = dispatch(args)
        out = emit_report(env, args.format, args.output, args.table)
    except NonConvergenceError as exc:
        print(f"fractalkit: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (PreconditionError, ValueError, OSError) as exc:
        print(f"fractalkit: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if not args.output:
        sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
