"""Nonnegative linear functionals given by finitely many weighted atoms.

A functional lives on R^n, the torus T^n (coordinates kept in [0, 1)), the
lattice Z^n, or an abstract finite metric space (atoms are point indices).
Test functions receive a scalar when n = 1 or the domain is abstract, and a
coordinate vector otherwise.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import PreconditionError
from .measure import CoveringEstimate
from .metric import FiniteMetricSpace, SetFamily, SubsetRef, diameter, enlargement, greedy_disjoint_selection
from .realline import MonotoneFn

KINDS = ("R", "T", "Z", "abstract")
TORUS_MERGE_DECIMALS = 12


@dataclass(frozen=True, eq=False)
class Domain:
    kind: str
    n: int = 1
    space: FiniteMetricSpace | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"domain kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "abstract":
            if self.space is None:
                raise PreconditionError("an abstract domain needs its metric space")
            object.__setattr__(self, "n", 1)
        elif int(self.n) < 1:
            raise PreconditionError("dimension must be positive")

    @property
    def is_group(self) -> bool:
        return self.kind != "abstract"

    def same(self, other: "Domain") -> bool:
        if self.kind != other.kind or self.n != other.n:
            return False
        return self.kind != "abstract" or self.space is other.space

    @property
    def tag(self) -> str:
        return "abstract" if self.kind == "abstract" else f"{self.kind}^{self.n}"


def _normalize(kind: str, pts: np.ndarray) -> np.ndarray:
    if kind == "T":
        q = np.mod(pts, 1.0)
        return np.where(1.0 - q <= 10.0 ** -TORUS_MERGE_DECIMALS, 0.0, q)
    if kind in ("Z", "abstract"):
        if not np.all(pts == np.round(pts)):
            raise PreconditionError("lattice and abstract atoms must be integers")
    return pts


@dataclass(frozen=True, eq=False)
class DiscreteFunctional:
    """lambda(f) = sum of w_i f(p_i) with w_i >= 0."""

    domain: Domain
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, self.domain.n)
        w = np.asarray(self.weights, dtype=float).ravel()
        if pts.shape != (w.size, self.domain.n):
            raise PreconditionError(f"atoms must have shape ({w.size}, {self.domain.n}), got {pts.shape}")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(w))):
            raise PreconditionError("atoms and weights must be finite")
        if np.any(w < 0):
            raise PreconditionError("weights must be nonnegative")
        pts = _normalize(self.domain.kind, pts)
        if self.domain.kind == "abstract" and pts.size:
            if pts.min() < 0 or pts.max() >= self.domain.space.n:
                raise PreconditionError("abstract atom index out of range")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def dirac(cls, domain: Domain, p, weight: float = 1.0) -> "DiscreteFunctional":
        return cls(domain, np.asarray(p, dtype=float).reshape(1, -1), [weight])

    @property
    def mass(self) -> float:
        """The bound constant C = sum of weights."""
        return math.fsum(self.weights.tolist())

    def atoms(self):
        for p, w in zip(self.points, self.weights):
            yield self._arg(p), float(w)

    def _arg(self, p: np.ndarray):
        if self.domain.kind == "abstract":
            return int(p[0])
        return float(p[0]) if self.domain.n == 1 else p.copy()

    def to_json(self) -> dict:
        dom = "abstract" if self.domain.kind == "abstract" else f"{self.domain.kind}^n"
        pts = self.points.astype(int) if self.domain.kind in ("Z", "abstract") else self.points
        return {"domain": dom, "n": self.domain.n,
                "atoms": [[p.tolist(), float(w)] for p, w in zip(pts, self.weights)]}


def _call(f: Callable, x):
    try:
        v = f(x)
    except Exception as exc:  # noqa: BLE001 - reported with context
        raise PreconditionError(f"test function failed at {x!r}: {exc}") from exc
    return v


def evaluate(lam: DiscreteFunctional, f: Callable) -> float:
    return math.fsum(w * float(_call(f, p)) for p, w in lam.atoms())


def evaluate_complex(lam: DiscreteFunctional, f: Callable) -> complex:
    terms = [w * complex(_call(f, p)) for p, w in lam.atoms()]
    return complex(math.fsum(z.real for z in terms), math.fsum(z.imag for z in terms))


def merged(lam: DiscreteFunctional) -> DiscreteFunctional:
    """Coincident atoms combined, zero weights dropped, atoms sorted."""
    kind = lam.domain.kind
    groups: dict[tuple, list] = {}
    for p, w in zip(lam.points, lam.weights):
        key = tuple(np.round(p, TORUS_MERGE_DECIMALS).tolist()) if kind == "T" else tuple(p.tolist())
        groups.setdefault(key, []).append((tuple(p.tolist()), float(w)))
    pts, ws = [], []
    for key in sorted(groups):
        members = groups[key]
        total = math.fsum(sorted(w for _, w in members))
        if total > 0:
            pts.append(min(p for p, _ in members))
            ws.append(total)
    arr = np.array(pts, dtype=float).reshape(len(pts), lam.domain.n)
    return DiscreteFunctional(lam.domain, arr, np.array(ws))


def support(lam: DiscreteFunctional) -> np.ndarray:
    return merged(lam).points


def product(lam1: DiscreteFunctional, lam2: DiscreteFunctional) -> DiscreteFunctional:
    """Atoms ((p, q), w_p w_q) on the concatenated domain."""
    d1, d2 = lam1.domain, lam2.domain
    if d1.kind != d2.kind or not d1.is_group:
        raise PreconditionError(f"cannot form a product of {d1.tag} and {d2.tag}")
    dom = Domain(d1.kind, d1.n + d2.n)
    k1, k2 = lam1.weights.size, lam2.weights.size
    pts = np.concatenate((np.repeat(lam1.points, k2, axis=0), np.tile(lam2.points, (k1, 1))), axis=1)
    w = np.repeat(lam1.weights, k2) * np.tile(lam2.weights, k1)
    return DiscreteFunctional(dom, pts, w)


def evaluate_iterated(lam1: DiscreteFunctional, lam2: DiscreteFunctional, phi: Callable,
                      inner: str = "second") -> float:
    """Integrate phi(x, y) against lam1 in x and lam2 in y, one variable at a time."""
    if inner == "second":
        return math.fsum(w * math.fsum(v * float(_call(lambda y: phi(x, y), y)) for y, v in lam2.atoms())
                         for x, w in lam1.atoms())
    if inner == "first":
        return math.fsum(v * math.fsum(w * float(_call(lambda x: phi(x, y), x)) for x, w in lam1.atoms())
                         for y, v in lam2.atoms())
    raise PreconditionError("inner must be 'first' or 'second'")


def _require_group(lam: DiscreteFunctional) -> None:
    if not lam.domain.is_group:
        raise PreconditionError("convolution needs R^n, T^n or Z^n")


def _shift(kind: str, y: np.ndarray, p: np.ndarray) -> np.ndarray:
    d = y - p
    return np.mod(d, 1.0) if kind == "T" else d


def convolve_fn(lam: DiscreteFunctional, f: Callable, y) -> float:
    """(lam * f)(y) = sum of w_i f(y - p_i)."""
    _require_group(lam)
    y = np.asarray(y, dtype=float).reshape(lam.domain.n)
    if lam.domain.kind == "T":
        y = np.mod(y, 1.0)
    one = lam.domain.n == 1
    return math.fsum(
        w * float(_call(f, float(d[0]) if one else d))
        for d, w in ((_shift(lam.domain.kind, y, p), w) for p, w in zip(lam.points, lam.weights))
    )


def convolve(lam1: DiscreteFunctional, lam2: DiscreteFunctional) -> DiscreteFunctional:
    """Atoms (p_i + q_j, w_i v_j), merged where they coincide."""
    _require_group(lam1)
    if not lam1.domain.same(lam2.domain):
        raise PreconditionError(f"domains differ: {lam1.domain.tag} vs {lam2.domain.tag}")
    k1, k2 = lam1.weights.size, lam2.weights.size
    pts = np.repeat(lam1.points, k2, axis=0) + np.tile(lam2.points, (k1, 1))
    w = np.repeat(lam1.weights, k2) * np.tile(lam2.weights, k1)
    return merged(DiscreteFunctional(lam1.domain, pts, w))


@dataclass(frozen=True)
class FourierValue:
    w: tuple[float, ...]
    value: complex


def _frequency(lam: DiscreteFunctional, w) -> np.ndarray:
    kind = lam.domain.kind
    if kind == "abstract":
        raise PreconditionError("an abstract domain has no Fourier transform")
    w = np.asarray(w, dtype=float).reshape(-1)
    if w.size != lam.domain.n or not np.all(np.isfinite(w)):
        raise PreconditionError(f"frequency must be a finite vector of length {lam.domain.n}")
    if kind == "T" and not np.all(w == np.round(w)):
        raise PreconditionError("frequencies of a torus functional must be integer vectors")
    return w


def character(w) -> Callable:
    """E^w(x) = exp(2 pi i x . w)."""
    w = np.asarray(w, dtype=float).reshape(-1)
    return lambda x: cmath.exp(2j * math.pi * float(np.dot(np.reshape(x, -1), w)))


def fourier(lam: DiscreteFunctional, w) -> FourierValue:
    """lam(E^{-w}) = sum of w_i exp(-2 pi i p_i . w)."""
    w = _frequency(lam, w)
    phase = -2 * np.pi * (lam.points @ w)
    terms = lam.weights * np.exp(1j * phase)
    value = complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))
    return FourierValue(tuple(w.tolist()), value)


def convolve_character(lam: DiscreteFunctional, w, y) -> complex:
    """(lam * E^w)(y), evaluated term by term."""
    _require_group(lam)
    _frequency(lam, w)
    E = character(w)
    y = np.asarray(y, dtype=float).reshape(lam.domain.n)
    return evaluate_complex(lam, lambda p: E(y - np.reshape(p, -1)))


def weak_convergence_check(seq: Sequence[DiscreteFunctional], lam: DiscreteFunctional,
                           tests: Sequence[Callable]) -> list[float]:
    """max over tests of |lam_j(f) - lam(f)| for each j."""
    for k, lj in enumerate(seq):
        if not lj.domain.same(lam.domain):
            raise PreconditionError(f"functional {k} lives on {lj.domain.tag}, not {lam.domain.tag}")
    target = [evaluate(lam, f) for f in tests]
    return [max((abs(evaluate(lj, f) - v) for f, v in zip(tests, target)), default=0.0) for lj in seq]


def to_stieltjes(lam: DiscreteFunctional) -> MonotoneFn:
    """Right-continuous step function whose jumps are the atoms of lam on R."""
    if lam.domain.kind != "R" or lam.domain.n != 1:
        raise PreconditionError("only functionals on R^1 have a Stieltjes representative")
    m = merged(lam)
    if m.weights.size == 0:
        return MonotoneFn.constant(0.0)
    after = np.cumsum(m.weights)
    before = np.concatenate(([0.0], after[:-1]))
    return MonotoneFn(m.points[:, 0], before, after, 0.0, float(after[-1]))


@dataclass(frozen=True)
class MaximalBoundResult:
    K: SubsetRef
    values: np.ndarray
    witnesses: tuple[SubsetRef, ...]
    selected: tuple[int, ...]
    content: CoveringEstimate
    bound: float

    def to_json(self) -> dict:
        return {"K": list(self.K), "content": self.content.to_json(), "bound": self.bound,
                "lambda_star": self.values.tolist()}


def _ball_table(space: FiniteMetricSpace, masses: np.ndarray, alpha: float):
    """For every center and radius level: ratio mass/diam^alpha of the closed ball.

    Returns per-point best ratio and its ball.
    """
    n = space.n
    D = space.full_matrix()
    best = np.full(n, -np.inf)
    best_ball: list[tuple[int, float] | None] = [None] * n
    for c in range(n):
        order = np.argsort(D[c], kind="stable")
        radii = D[c, order]
        M = D[np.ix_(order, order)]
        rowmax = np.concatenate(([0.0], np.tril(M, -1)[1:].max(axis=1)))
        diam = np.maximum.accumulate(rowmax)
        mass = np.cumsum(masses[order])
        # a ball is a prefix ending at the last point of its radius
        ends = np.flatnonzero(np.append(radii[1:] != radii[:-1], True))
        ratio = np.full(n, -np.inf)
        ok = diam[ends] > 0
        ratio[ends[ok]] = mass[ends[ok]] / diam[ends[ok]] ** alpha
        # best ball from this center containing the point at rank r: suffix max
        suffix = np.maximum.accumulate(ratio[::-1])[::-1]
        arg = np.empty(n, dtype=int)
        run = n - 1
        for r in range(n - 1, -1, -1):
            if ratio[r] >= ratio[run]:
                run = r
            arg[r] = run
        rank_vals = suffix
        pts = order
        better = rank_vals > best[pts]
        for r in np.flatnonzero(better):
            best[pts[r]] = rank_vals[r]
            best_ball[pts[r]] = (c, float(radii[arg[r]]))
    return best, best_ball


def functional_maximal_bound(lam: DiscreteFunctional, alpha: float, t: float,
                             balls: Sequence | None = None) -> MaximalBoundResult:
    """Superlevel set K of the ball maximal function of lam and a witnessed
    cover of K whose alpha-sum is at most 3^alpha C / t.

    Test functions are ball indicators.  Candidate sets default to all closed
    metric balls; sets of diameter 0 are never used.
    """
    if lam.domain.kind != "abstract":
        raise PreconditionError("the metric-space maximal bound needs an abstract domain")
    if not alpha > 0 or not t > 0:
        raise PreconditionError("alpha and t must be positive")
    space = lam.domain.space
    n = space.n
    masses = np.zeros(n)
    np.add.at(masses, lam.points[:, 0].astype(int), lam.weights)
    if balls is None:
        if n < 2:
            raise PreconditionError("no candidate sets of positive diameter")
        values, which = _ball_table(space, masses, alpha)
        D = space.full_matrix()

        def witness(x):
            c, r = which[x]
            return SubsetRef(tuple(np.flatnonzero(D[c] <= r).tolist()))
    else:
        cands = [SubsetRef.of(b) for b in balls]
        cands = [b for b in cands if diameter(space, b) > 0]
        if not cands:
            raise PreconditionError("no candidate sets of positive diameter")
        ratios = np.array([masses[b.array()].sum() / diameter(space, b) ** alpha for b in cands])
        values = np.full(n, -np.inf)
        pick: list[int | None] = [None] * n
        for k, b in enumerate(cands):
            for x in b:
                if ratios[k] > values[x]:
                    values[x], pick[x] = ratios[k], k

        def witness(x):
            return cands[pick[x]]
    values = np.where(np.isfinite(values), values, 0.0)
    K = SubsetRef(tuple(np.flatnonzero(values > t).tolist()))
    C = lam.mass
    bound = 3 ** alpha * C / t
    if len(K) == 0:
        est = CoveringEstimate(float(alpha), math.inf, SetFamily(()), 0.0, "greedy", "empty superlevel set")
        return MaximalBoundResult(K, values, (), (), est, bound)
    wit = tuple(witness(x) for x in K)
    selected = greedy_disjoint_selection(space, wit)
    cover = tuple(enlargement(space, wit[k]) for k in selected)
    value = math.fsum(diameter(space, U) ** alpha for U in cover)
    est = CoveringEstimate(float(alpha), math.inf, SetFamily(cover), value, "greedy",
                           "enlarged disjoint witnesses")
    return MaximalBoundResult(K, values, wit, tuple(selected), est, bound)
