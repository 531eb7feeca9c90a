"""Monotone functions on the line and the analysis built on them.

A :class:`MonotoneFn` is piecewise linear between nodes and may jump at a
node, so its one-sided limits, mu-lengths and jumps are read off exactly.
Its value at a node is the right limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NonConvergenceError, PreconditionError


@dataclass(frozen=True)
class IntervalSpec:
    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi) or lo > hi:
            raise PreconditionError(f"malformed interval: lo={lo}, hi={hi}")
        if (math.isinf(lo) and self.lo_closed) or (math.isinf(hi) and self.hi_closed):
            raise PreconditionError("infinite endpoints must be open")
        if lo == hi and not (self.lo_closed and self.hi_closed):
            raise PreconditionError("a degenerate interval must be closed at both ends")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def open(cls, lo, hi):
        return cls(lo, hi, False, False)

    @classmethod
    def closed(cls, lo, hi):
        return cls(lo, hi, True, True)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above & below

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "lo_closed": self.lo_closed, "hi_closed": self.hi_closed}

    def __str__(self):
        return f"{'[' if self.lo_closed else '('}{self.lo}, {self.hi}{']' if self.hi_closed else ')'}"


@dataclass(frozen=True)
class MonotoneFn:
    """Bounded nondecreasing function given by nodes (x, mu(x-), mu(x+)).

    Between consecutive nodes it is linear from mu(x_k+) to mu(x_{k+1}-);
    it equals ``left`` below the first node and ``right`` above the last.
    """

    xs: np.ndarray
    ym: np.ndarray
    yp: np.ndarray
    left: float
    right: float

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float).ravel()
        ym = np.asarray(self.ym, dtype=float).ravel()
        yp = np.asarray(self.yp, dtype=float).ravel()
        if not (xs.size == ym.size == yp.size):
            raise PreconditionError("node arrays differ in length")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ym)) and np.all(np.isfinite(yp))):
            raise PreconditionError("node entries must be finite")
        if np.any(np.diff(xs) <= 0):
            raise PreconditionError("node positions must be strictly increasing")
        if np.any(yp < ym):
            k = int(np.flatnonzero(yp < ym)[0])
            raise PreconditionError(f"negative jump at node {k} (x={xs[k]})")
        if np.any(ym[1:] < yp[:-1]):
            k = int(np.flatnonzero(ym[1:] < yp[:-1])[0])
            raise PreconditionError(f"function decreases between nodes {k} and {k + 1}")
        left, right = float(self.left), float(self.right)
        if xs.size:
            if left != ym[0] or right != yp[-1]:
                raise PreconditionError("tail constants must equal mu(x_1-) and mu(x_last+)")
        elif left != right:
            raise PreconditionError("a function without nodes is constant")
        for name, arr in (("xs", xs), ("ym", ym), ("yp", yp)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @classmethod
    def from_nodes(cls, nodes, left: float | None = None, right: float | None = None) -> "MonotoneFn":
        nodes = [tuple(map(float, nd)) for nd in nodes]
        if not nodes:
            if left is None:
                raise PreconditionError("a constant function needs its value")
            return cls(np.empty(0), np.empty(0), np.empty(0), left, left if right is None else right)
        xs, ym, yp = (np.array(c) for c in zip(*nodes))
        return cls(xs, ym, yp, ym[0] if left is None else left, yp[-1] if right is None else right)

    @classmethod
    def constant(cls, c: float) -> "MonotoneFn":
        return cls.from_nodes([], c)

    @classmethod
    def clamp(cls, lo: float = 0.0, hi: float = 1.0) -> "MonotoneFn":
        """x clamped to [lo, hi]."""
        return cls.from_nodes([(lo, lo, lo), (hi, hi, hi)])

    @classmethod
    def step(cls, p: float, height: float = 1.0, base: float = 0.0) -> "MonotoneFn":
        return cls.from_nodes([(p, base, base + height)])

    @property
    def A(self) -> float:
        return self.left

    @property
    def B(self) -> float:
        return self.right

    @property
    def nodes(self) -> list[tuple[float, float, float]]:
        return list(zip(self.xs.tolist(), self.ym.tolist(), self.yp.tolist()))

    @property
    def is_constant(self) -> bool:
        return self.left == self.right

    def _locate(self, x):
        x = np.asarray(x, dtype=float)
        k = np.searchsorted(self.xs, x, side="right") - 1
        return x, k

    def _between(self, x, k):
        """Value on the open piece right of node k (k may be -1 or last)."""
        n = self.xs.size
        out = np.empty(np.shape(x))
        below = k < 0
        above = k >= n - 1
        mid = ~(below | above)
        out[below] = self.left
        out[above] = self.right
        if np.any(mid):
            km = k[mid]
            x0, x1 = self.xs[km], self.xs[km + 1]
            y0, y1 = self.yp[km], self.ym[km + 1]
            out[mid] = y0 + (y1 - y0) * ((x[mid] - x0) / (x1 - x0))
        return out

    def limits(self, x):
        """(mu(x-), mu(x+)) elementwise."""
        x, k = self._locate(x)
        x1 = np.atleast_1d(x)
        k1 = np.atleast_1d(k)
        if self.xs.size == 0:
            c = np.full(x1.shape, self.left)
            lo, hi = c, c.copy()
        else:
            base = self._between(x1, k1)
            lo, hi = base.copy(), base.copy()
            at = (k1 >= 0) & (self.xs[np.clip(k1, 0, None)] == x1)
            lo[at] = self.ym[k1[at]]
            hi[at] = self.yp[k1[at]]
        if np.ndim(x) == 0:
            return float(lo[0]), float(hi[0])
        return lo.reshape(np.shape(x)), hi.reshape(np.shape(x))

    def __call__(self, x):
        return self.limits(x)[1]

    def to_json(self) -> dict:
        return {"nodes": [list(nd) for nd in self.nodes], "left": self.left, "right": self.right}


def one_sided_limits(mu: MonotoneFn, x: float) -> tuple[float, float]:
    return mu.limits(float(x))


def _limit_at(mu: MonotoneFn, x: float, side: str) -> float:
    if x == -math.inf:
        return mu.A
    if x == math.inf:
        return mu.B
    lo, hi = mu.limits(x)
    return lo if side == "-" else hi


def mu_length(mu: MonotoneFn, J: IntervalSpec) -> float:
    """Increment of mu over J, with one-sided limits chosen by endpoint type."""
    if not isinstance(J, IntervalSpec):
        raise PreconditionError("J must be an IntervalSpec")
    lo = _limit_at(mu, J.lo, "-" if J.lo_closed else "+")
    hi = _limit_at(mu, J.hi, "+" if J.hi_closed else "-")
    return hi - lo


@dataclass(frozen=True)
class StepFunction:
    """phi(x) = sum of weight * indicator(J) over the terms."""

    terms: tuple[tuple[IntervalSpec, float], ...]

    def __post_init__(self):
        terms = tuple((J, float(a)) for J, a in self.terms)
        for J, a in terms:
            if not J.bounded:
                raise PreconditionError("step-function intervals must be bounded")
            if not a > 0:
                raise PreconditionError(f"step-function weights must be positive, got {a}")
        object.__setattr__(self, "terms", terms)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(np.shape(x))
        for J, a in self.terms:
            out = out + a * J.contains(x)
        return out

    @property
    def breakpoints(self) -> np.ndarray:
        return np.unique([v for J, _ in self.terms for v in (J.lo, J.hi)])

    @property
    def total_weight(self) -> float:
        return math.fsum(a for _, a in self.terms)

    def to_json(self) -> list[dict]:
        return [dict(J.to_json(), weight=a) for J, a in self.terms]


@dataclass(frozen=True)
class Partition:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size < 2 or np.any(np.diff(pts) <= 0):
            raise PreconditionError("partition points must be strictly increasing, at least 2")
        object.__setattr__(self, "points", pts)

    @property
    def mesh(self) -> float:
        return float(np.diff(self.points).max())


def _vectorize(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def g(x: np.ndarray) -> np.ndarray:
        try:
            y = np.asarray(f(x), dtype=float)
            if y.shape == x.shape:
                return y
        except Exception:  # noqa: BLE001 - retry pointwise
            pass
        return np.array([float(f(float(v))) for v in x])

    return g


def _refine(pts: np.ndarray) -> np.ndarray:
    out = np.empty(2 * pts.size - 1)
    out[0::2] = pts
    out[1::2] = 0.5 * (pts[:-1] + pts[1:])
    return out


def stieltjes_sum(f: Callable, mu: MonotoneFn, points) -> float:
    """Riemann-Stieltjes sum over a partition.

    Each cell is tagged at its midpoint, except that a cell ending at a jump
    of mu is tagged at that jump.
    """
    pts = np.asarray(points, dtype=float)
    fv = _vectorize(f)
    incr = np.diff(mu(pts))
    tags = 0.5 * (pts[:-1] + pts[1:])
    if mu.xs.size:
        jumps = mu.xs[mu.yp > mu.ym]
        at_jump = np.isin(pts[1:], jumps)
        tags[at_jump] = pts[1:][at_jump]
    return math.fsum((fv(tags) * incr).tolist())


def stieltjes_integral(f: Callable, mu: MonotoneFn, a: float, b: float,
                       tol: float = 1e-9, max_depth: int = 30, max_points: int = 1 << 24) -> float:
    """Integral of f d mu over (a, b] by mesh halving until sums settle.

    Jumps of mu inside the range are always partition points, so a jump at p
    contributes f(p) times its height; a jump at a itself is excluded.
    """
    if not a < b:
        raise PreconditionError(f"need a < b, got a={a}, b={b}")
    if not tol > 0:
        raise PreconditionError("tol must be positive")
    inner = mu.xs[(mu.xs > a) & (mu.xs < b)]
    pts = np.concatenate(([a], inner, [b]))
    prev = stieltjes_sum(f, mu, pts)
    for _ in range(max_depth):
        if 2 * pts.size > max_points:
            break
        pts = _refine(pts)
        cur = stieltjes_sum(f, mu, pts)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    raise NonConvergenceError(
        f"Riemann-Stieltjes sums did not settle to {tol} (f may be discontinuous at a jump of mu)"
    )


@dataclass(frozen=True)
class PiecewiseLinear:
    """Linear interpolation through (xs, ys), constant beyond the ends."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.shape != ys.shape or xs.size < 1 or np.any(np.diff(xs) <= 0):
            raise PreconditionError("breakpoints must be strictly increasing and match values")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __call__(self, x):
        return np.interp(x, self.xs, self.ys)

    def restricted(self, a: float, b: float) -> "PiecewiseLinear":
        inner = self.xs[(self.xs > a) & (self.xs < b)]
        xs = np.concatenate(([a], inner, [b])) if b > a else np.array([a])
        return PiecewiseLinear(xs, self(xs))


@dataclass(frozen=True)
class VariationEstimate:
    estimates: tuple[float, ...]
    value: float
    exact: bool

    @property
    def lower_bound(self) -> bool:
        return not self.exact


def partition_variation(h: Callable, points) -> float:
    vals = _vectorize(h)(np.asarray(points, dtype=float))
    return math.fsum(np.abs(np.diff(vals)).tolist())


def total_variation(h, a: float, b: float, schedule: Sequence[int] = (2, 4, 6, 8, 10, 12),
                    turning_points: Sequence[float] | None = None) -> VariationEstimate:
    """Variation of h over [a, b] along nested dyadic partitions.

    ``schedule`` lists dyadic levels; level k splits [a, b] into 2^k cells.
    A :class:`PiecewiseLinear` input is measured exactly from its breakpoints.
    For a callable the result is exact only when every turning point is
    declared; otherwise it is a lower bound of the supremum.
    """
    if not a < b:
        raise PreconditionError(f"need a < b, got a={a}, b={b}")
    levels = sorted(int(k) for k in schedule)
    if not levels:
        raise PreconditionError("refinement schedule is empty")
    if isinstance(h, PiecewiseLinear):
        r = h.restricted(a, b)
        v = math.fsum(np.abs(np.diff(r.ys)).tolist())
        return VariationEstimate(tuple(v for _ in levels), v, True)
    extra = np.array([] if turning_points is None else list(turning_points), dtype=float)
    extra = extra[(extra > a) & (extra < b)]
    estimates, best = [], 0.0
    for k in levels:
        grid = np.linspace(a, b, 2 ** k + 1)
        pts = np.unique(np.concatenate((grid, extra)))
        best = max(best, partition_variation(h, pts))
        estimates.append(best)
    return VariationEstimate(tuple(estimates), best, turning_points is not None)


def jordan_decomposition(h: PiecewiseLinear, a: float, b: float) -> tuple[MonotoneFn, MonotoneFn]:
    """h = g1 - g2 on [a, b] with g1(x) = V_a^x(h) and g2 = g1 - h."""
    if not a < b:
        raise PreconditionError(f"need a < b, got a={a}, b={b}")
    r = h.restricted(a, b)
    d = np.diff(r.ys)
    g1 = np.concatenate(([0.0], np.cumsum(np.abs(d))))
    g2 = -r.ys[0] + np.concatenate(([0.0], np.cumsum(np.abs(d) - d)))
    return (MonotoneFn(r.xs, g1, g1, g1[0], g1[-1]), MonotoneFn(r.xs, g2, g2, g2[0], g2[-1]))


def discontinuities(mu: MonotoneFn) -> list[tuple[float, float]]:
    jumps = mu.yp - mu.ym
    keep = jumps > 0
    return list(zip(mu.xs[keep].tolist(), jumps[keep].tolist()))


@dataclass(frozen=True)
class MaximalValue:
    value: float
    witness: IntervalSpec | None
    lower_bound: bool


def _candidate_points(mu: MonotoneFn, x: float, depth: int) -> np.ndarray:
    xs = mu.xs
    parts = [xs, [x]]
    for lo, hi in zip(xs[:-1], xs[1:]):
        parts.append(np.linspace(lo, hi, 2 ** depth + 1))
    span = float(xs[-1] - xs[0]) if xs.size > 1 else 1.0
    span = span if span > 0 else 1.0
    steps = span * 2.0 ** -np.arange(depth + 1)
    parts += [x - steps, x + steps]
    return np.unique(np.concatenate([np.asarray(p, dtype=float) for p in parts]))


def maximal_function(mu: MonotoneFn, alpha: float, x: float, depth: int = 12,
                     chunk: int = 2_000_000) -> MaximalValue:
    """Largest mu(J)/|J|^alpha over open intervals J containing x whose
    endpoints lie on the candidate grid.

    The grid holds the nodes, the dyadic points of depth ``depth`` between
    adjacent nodes, and points approaching x.  The result is a lower bound for
    the supremum over all bounded open intervals.
    """
    if not 0 < alpha <= 1:
        raise PreconditionError(f"alpha must lie in (0, 1], got {alpha}")
    if not math.isfinite(x):
        raise PreconditionError("x must be finite")
    if mu.is_constant:
        return MaximalValue(0.0, None, False)
    cand = _candidate_points(mu, float(x), depth)
    U = cand[cand < x]
    V = cand[cand > x]
    mu_u = mu.limits(U)[1]
    mu_v = mu.limits(V)[0]
    best, arg = -1.0, None
    step = max(1, chunk // max(V.size, 1))
    for s in range(0, U.size, step):
        u = U[s:s + step, None]
        ratio = (mu_v[None, :] - mu_u[s:s + step, None]) / (V[None, :] - u) ** alpha
        k = int(np.argmax(ratio))
        i, j = divmod(k, V.size)
        if ratio[i, j] > best:
            best, arg = float(ratio[i, j]), (float(U[s + i]), float(V[j]))
    return MaximalValue(best, IntervalSpec.open(*arg), True)


@dataclass(frozen=True)
class Superlevel:
    intervals: tuple[IntervalSpec, ...]
    length: float
    bound: float

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(np.shape(x), dtype=bool)
        for J in self.intervals:
            out |= J.contains(x)
        return out

    def to_json(self) -> dict:
        return {"intervals": [J.to_json() for J in self.intervals], "length": self.length, "bound": self.bound}


def _merge_pieces(pieces) -> list[IntervalSpec]:
    """Merge sorted (lo, hi, lo_closed, hi_closed) pieces that touch."""
    out: list[list] = []
    for lo, hi, lc, hc in pieces:
        if out and out[-1][1] == lo and (out[-1][3] or lc):
            out[-1][1], out[-1][3] = hi, hc
        else:
            out.append([lo, hi, lc, hc])
    return [IntervalSpec(*p) for p in out]


def maximal_superlevel(mu: MonotoneFn, t: float, method: str = "exact",
                       scan: Sequence[float] | None = None, depth: int = 8) -> Superlevel:
    """{x : mu*_1(x) > t} with its length and the bound 2 (B - A) / t.

    ``exact`` decides membership from one-sided limits at the nodes: x is in
    the set iff mu(v-) - t v > mu(u+) - t u for some u < x < v, and on each
    piece between nodes this is a linear condition.  ``scan`` evaluates
    :func:`maximal_function` on the given grid and merges runs, which can only
    under-report the set.
    """
    if not t > 0:
        raise PreconditionError(f"t must be positive, got {t}")
    bound = 2 * (mu.B - mu.A) / t
    if mu.is_constant:
        return Superlevel((), 0.0, bound)
    if method == "scan":
        return _superlevel_scan(mu, t, scan, depth, bound)
    if method != "exact":
        raise PreconditionError(f"method must be 'exact' or 'scan', got {method!r}")
    xs = mu.xs
    n = xs.size
    g_minus = mu.ym - t * xs
    g_plus = mu.yp - t * xs
    # R[k]: sup over nodes with index >= k of mu(p+) - t p;  L[k]: inf over index <= k of mu(p-) - t p
    R = np.append(np.maximum.accumulate(g_plus[::-1])[::-1], -np.inf)
    L = np.concatenate(([np.inf], np.minimum.accumulate(g_minus)))
    pieces = []
    for k in range(n + 1):
        lo = xs[k - 1] if k > 0 else -np.inf
        hi = xs[k] if k < n else np.inf
        right_sup, left_inf = R[k], L[k]
        # g(x) = mu(x) - t x on (lo, hi) is linear
        if k == 0:
            g0, slope = mu.A, -t
            x0 = hi
        elif k == n:
            g0, slope = mu.B, -t
            x0 = lo
        else:
            x0 = lo
            g0 = mu.yp[k - 1]
            slope = (mu.ym[k] - mu.yp[k - 1]) / (hi - lo) - t
        g0 = g0 - t * x0
        spans = []
        if right_sup > left_inf:
            spans.append((lo, hi))
        else:
            spans += _halfline(g0, slope, x0, left_inf, lo, hi, above=True)
            spans += _halfline(g0, slope, x0, right_sup, lo, hi, above=False)
        for s_lo, s_hi in _union(spans):
            pieces.append((s_lo, s_hi, False, False))
        if k < n:
            sup_here = max(g_plus[k], R[k + 1])
            inf_here = min(g_minus[k], L[k])
            if sup_here > inf_here:
                pieces.append((xs[k], xs[k], True, True))
    pieces.sort(key=lambda p: (p[0], not p[2]))
    intervals = _merge_pieces(pieces)
    length = math.fsum(J.length for J in intervals)
    return Superlevel(tuple(intervals), length, bound)


def _halfline(g0, slope, x0, level, lo, hi, above: bool):
    """Part of (lo, hi) where g0 + slope (x - x0) is > level (or < level)."""
    if not math.isfinite(level):
        return []
    if slope == 0:
        ok = g0 > level if above else g0 < level
        return [(lo, hi)] if ok else []
    root = x0 + (level - g0) / slope
    increasing = (slope > 0) == above
    s_lo, s_hi = (max(lo, root), hi) if increasing else (lo, min(hi, root))
    return [(s_lo, s_hi)] if s_lo < s_hi else []


def _union(spans):
    spans = sorted(spans)
    out = []
    for lo, hi in spans:
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def _superlevel_scan(mu, t, scan, depth, bound) -> Superlevel:
    if scan is None:
        lo, hi = float(mu.xs[0]), float(mu.xs[-1])
        pad = max(hi - lo, 1.0) * 2 * (mu.B - mu.A) / t
        scan = np.linspace(lo - pad, hi + pad, 401)
    scan = np.sort(np.asarray(scan, dtype=float))
    hit = np.array([maximal_function(mu, 1.0, float(x), depth).value > t for x in scan])
    intervals = []
    k = 0
    while k < scan.size:
        if hit[k]:
            j = k
            while j + 1 < scan.size and hit[j + 1]:
                j += 1
            intervals.append(IntervalSpec.closed(scan[k], scan[j]))
            k = j + 1
        else:
            k += 1
    return Superlevel(tuple(intervals), math.fsum(J.length for J in intervals), bound)


def multiplicity(intervals: Sequence[IntervalSpec], x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros(np.shape(x), dtype=int)
    for J in intervals:
        out = out + J.contains(x)
    return out


def probe_points(intervals: Sequence[IntervalSpec]) -> np.ndarray:
    """Every endpoint plus one point inside each gap between endpoints."""
    ends = np.unique([v for J in intervals for v in (J.lo, J.hi) if math.isfinite(v)])
    if ends.size == 0:
        return np.array([0.0])
    mids = 0.5 * (ends[:-1] + ends[1:])
    return np.concatenate(([ends[0] - 1.0], ends, mids, [ends[-1] + 1.0]))


def _left_key(J: IntervalSpec):
    return (J.lo, 0 if J.lo_closed else 1)


def _right_key(J: IntervalSpec):
    return (J.hi, 1 if J.hi_closed else 0)


def interval_overlap_reduce(intervals: Sequence[IntervalSpec]) -> list[int]:
    """Indices of a subfamily with the same union in which no point lies in
    more than two intervals.

    While some point lies in three intervals, one of those three sits inside
    the union of the other two and is dropped.
    """
    keep = list(range(len(intervals)))
    while True:
        current = [intervals[i] for i in keep]
        probes = probe_points(current)
        mult = multiplicity(current, probes)
        over = np.flatnonzero(mult >= 3)
        if over.size == 0:
            return keep
        x = probes[over[0]]
        trio = [i for i in keep if intervals[i].contains(x)][:3]
        first = min(trio, key=lambda i: (_left_key(intervals[i]), i))
        last = max(trio, key=lambda i: (_right_key(intervals[i]), -i))
        drop = next(i for i in reversed(trio) if i not in (first, last))
        keep.remove(drop)


@dataclass(frozen=True)
class ChebyshevResult:
    superlevel: tuple[IntervalSpec, ...]
    length: float
    bound: float

    def to_json(self) -> dict:
        return {"superlevel": [J.to_json() for J in self.superlevel], "length": self.length, "bound": self.bound}


def step_chebyshev(phi: StepFunction, t: float) -> ChebyshevResult:
    """Exact {phi > t} by a breakpoint sweep, with t^-1 * sum a_p |J_p|."""
    if not t > 0:
        raise PreconditionError(f"t must be positive, got {t}")
    bound = math.fsum(a * J.length for J, a in phi.terms) / t
    b = phi.breakpoints
    if b.size == 0:
        return ChebyshevResult((), 0.0, bound)
    pieces = []
    at_points = phi(b) > t
    mids = phi(0.5 * (b[:-1] + b[1:])) > t
    for k in range(b.size):
        if at_points[k]:
            pieces.append((b[k], b[k], True, True))
        if k < b.size - 1 and mids[k]:
            pieces.append((b[k], b[k + 1], False, False))
    merged = _merge_pieces(pieces)
    return ChebyshevResult(tuple(merged), math.fsum(J.length for J in merged), bound)
