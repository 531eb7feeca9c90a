"""Readers and writers for the file formats used by the command line."""
from __future__ import annotations

import ast
import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .cantor import CantorLevel, CantorSpec
from .errors import PreconditionError
from .functionals import DiscreteFunctional, Domain
from .lipschitz import SampledFunction
from .metric import FiniteMetricSpace, SubsetRef
from .realline import IntervalSpec, MonotoneFn, StepFunction


def _rows(path) -> list[tuple[int, list[str]]]:
    text = Path(path).read_text()
    out = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [c.strip() for c in row]
        if cells and any(cells):
            out.append((lineno, cells))
    return out


def _numeric(path, allow_header=True) -> np.ndarray:
    rows = _rows(path)
    if not rows:
        raise PreconditionError(f"{path}: no data rows")
    if allow_header:
        try:
            [float(c) for c in rows[0][1]]
        except ValueError:
            rows = rows[1:]
    data = []
    width = None
    for lineno, cells in rows:
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            raise PreconditionError(f"{path}: line {lineno}: non-numeric entry in {cells}") from None
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise PreconditionError(f"{path}: line {lineno}: expected {width} columns, got {len(vals)}")
        data.append(vals)
    if not data:
        raise PreconditionError(f"{path}: no data rows")
    return np.array(data)


def read_point_cloud(path) -> np.ndarray:
    """One point per line, comma-separated coordinates, optional header."""
    return _numeric(path)


def read_matrix(path) -> np.ndarray:
    return _numeric(path, allow_header=False)


def read_space(path, matrix: bool = False) -> FiniteMetricSpace:
    if matrix:
        return FiniteMetricSpace.explicit(read_matrix(path))
    return FiniteMetricSpace.euclidean(read_point_cloud(path))


def write_points(path, points) -> None:
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in P:
            w.writerow([repr(float(v)) for v in row])


def _json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"{path}: invalid JSON: {exc}") from None


def read_subset(path) -> SubsetRef:
    data = _json(path)
    if not isinstance(data, list) or not all(isinstance(i, int) for i in data):
        raise PreconditionError(f"{path}: a subset is a JSON array of integer indices")
    return SubsetRef.of(data)


def read_subsets(path) -> list[SubsetRef]:
    data = _json(path)
    if not isinstance(data, list) or not all(isinstance(s, list) for s in data):
        raise PreconditionError(f"{path}: expected a JSON array of index arrays")
    return [SubsetRef.of(s) for s in data]


def cantor_spec_from_json(data) -> CantorSpec:
    try:
        return CantorSpec(tuple(data.get("prefix", [])), float(data["tail"]), int(data.get("max_depth", 40)))
    except (KeyError, TypeError, AttributeError) as exc:
        raise PreconditionError(f"malformed Cantor spec: {exc}") from None


def read_cantor_spec(path) -> CantorSpec:
    return cantor_spec_from_json(_json(path))


def levels_csv(level: CantorLevel) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["left", "right"])
    for lo, hi in level.intervals:
        w.writerow([repr(lo), repr(hi)])
    return buf.getvalue()


def read_sampled_function(path) -> SampledFunction:
    """CSV rows (index, value)."""
    data = _numeric(path)
    if data.shape[1] != 2:
        raise PreconditionError(f"{path}: expected columns index,value")
    idx = data[:, 0]
    if not np.all(idx == np.round(idx)):
        raise PreconditionError(f"{path}: indices must be integers")
    order = np.argsort(idx)
    if np.any(np.diff(idx[order]) == 0):
        raise PreconditionError(f"{path}: repeated index")
    return SampledFunction(SubsetRef(tuple(idx[order].astype(int).tolist())), data[order, 1])


def monotone_from_json(data) -> MonotoneFn:
    try:
        nodes = data["nodes"]
        for k, nd in enumerate(nodes):
            if len(nd) != 3:
                raise PreconditionError(f"node {k}: expected [x, y_minus, y_plus]")
        return MonotoneFn.from_nodes(nodes, data.get("left"), data.get("right"))
    except (KeyError, TypeError) as exc:
        raise PreconditionError(f"malformed monotone function: {exc}") from None


def read_monotone(path) -> MonotoneFn:
    return monotone_from_json(_json(path))


def step_from_json(data) -> StepFunction:
    terms = []
    for k, term in enumerate(data):
        try:
            J = IntervalSpec(term["lo"], term["hi"], bool(term.get("lo_closed", False)),
                             bool(term.get("hi_closed", False)))
            terms.append((J, float(term["weight"])))
        except (KeyError, TypeError) as exc:
            raise PreconditionError(f"step term {k}: {exc}") from None
    return StepFunction(tuple(terms))


def read_step_function(path) -> StepFunction:
    return step_from_json(_json(path))


def functional_from_json(data, space: FiniteMetricSpace | None = None) -> DiscreteFunctional:
    try:
        dom = str(data["domain"])
        n = int(data.get("n", 1))
        atoms = data["atoms"]
    except (KeyError, TypeError) as exc:
        raise PreconditionError(f"malformed functional: {exc}") from None
    kind = {"R^n": "R", "T^n": "T", "Z^n": "Z", "abstract": "abstract"}.get(dom)
    if kind is None:
        raise PreconditionError(f"unknown functional domain {dom!r}")
    domain = Domain(kind, n, space) if kind == "abstract" else Domain(kind, n)
    pts, ws = [], []
    for k, atom in enumerate(atoms):
        try:
            coords, w = atom
            coords = [coords] if not isinstance(coords, list) else coords
            pts.append([float(c) for c in coords])
            ws.append(float(w))
        except (TypeError, ValueError) as exc:
            raise PreconditionError(f"atom {k}: {exc}") from None
    arr = np.array(pts, dtype=float).reshape(len(pts), domain.n)
    return DiscreteFunctional(domain, arr, np.array(ws))


def read_functional(path, space=None) -> DiscreteFunctional:
    return functional_from_json(_json(path), space)


def table_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


_FUNCS = {name: getattr(np, name) for name in (
    "sin", "cos", "tan", "exp", "log", "sqrt", "abs", "tanh", "arctan", "floor", "ceil",
    "minimum", "maximum", "where", "sign", "dot", "sum",
)}
_FUNCS.update(pi=math.pi, e=math.e)
_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load, ast.Constant,
    ast.Subscript, ast.Compare, ast.IfExp, ast.Tuple, ast.Slice,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.Mod, ast.FloorDiv, ast.USub, ast.UAdd,
    ast.Lt, ast.LtE, ast.Gt, ast.GtE, ast.Eq, ast.NotEq,
)


def parse_expression(src: str, variables=("x",)):
    """Compile an arithmetic expression in ``variables`` to a callable.

    Only arithmetic, comparisons, indexing and a fixed set of numpy functions
    are accepted.
    """
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise PreconditionError(f"cannot parse expression {src!r}: {exc.msg}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _NODES):
            raise PreconditionError(f"expression {src!r} uses a disallowed construct: {type(node).__name__}")
        if isinstance(node, ast.Name) and node.id not in _FUNCS and node.id not in variables:
            raise PreconditionError(f"expression {src!r}: unknown name {node.id!r}")
    code = compile(tree, "<expr>", "eval")

    def fn(*args):
        return eval(code, {"__builtins__": {}}, dict(_FUNCS, **dict(zip(variables, args))))

    fn.source = src
    return fn
