"""Lipschitz functions sampled on finite metric spaces.

Functions exist only through their values at sample points; extensions and
approximations are evaluated at explicit query points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .measure import CoveringEstimate, hausdorff_sum
from .metric import FiniteMetricSpace, SetFamily, SubsetRef, as_subset, diameter
from .realline import IntervalSpec, StepFunction, step_chebyshev

LIP_RTOL = 1e-12


@dataclass(frozen=True)
class SampledFunction:
    domain: SubsetRef
    values: np.ndarray

    def __post_init__(self):
        dom = as_subset(self.domain)
        vals = np.asarray(self.values, dtype=float).ravel()
        if vals.size != len(dom):
            raise PreconditionError(f"{len(dom)} domain points but {vals.size} values")
        if not np.all(np.isfinite(vals)):
            raise PreconditionError("sampled values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "values", vals)

    @classmethod
    def on(cls, space: FiniteMetricSpace, fn) -> "SampledFunction":
        """Sample ``fn(index)`` at every point of the space."""
        return cls(space.all(), [fn(i) for i in range(space.n)])

    def value_map(self) -> dict[int, float]:
        return dict(zip(self.domain.indices, self.values.tolist()))

    def at(self, i: int) -> float:
        try:
            return self.value_map()[int(i)]
        except KeyError:
            raise PreconditionError(f"point {i} is outside the function's domain") from None


def lipschitz_constant(space: FiniteMetricSpace, f: SampledFunction) -> float:
    """Least C with |f(x) - f(y)| <= C d(x, y) over the sample."""
    idx = space.indices(f.domain)
    if idx.size < 2:
        raise PreconditionError("need at least two domain points")
    D = space.distances(idx, idx)
    dv = np.abs(f.values[:, None] - f.values[None, :])
    off = ~np.eye(idx.size, dtype=bool)
    if np.any(off & (D == 0) & (dv > 0)):
        raise PreconditionError("coincident points carry distinct values (infinite constant)")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(off & (D > 0), dv / D, 0.0)
    return float(ratio.max())


def _check_lipschitz(space, f: SampledFunction, C: float) -> None:
    if C < 0:
        raise PreconditionError(f"Lipschitz constant must be nonnegative, got {C}")
    if len(f.domain) < 2:
        return
    L = lipschitz_constant(space, f)
    if L > C * (1 + LIP_RTOL) + LIP_RTOL:
        raise PreconditionError(f"function is {L}-Lipschitz, not {C}-Lipschitz")


def mcshane_extend(space: FiniteMetricSpace, h: SampledFunction, C: float, query) -> np.ndarray | float:
    """min over y in E of h(y) + C d(query, y), at one index or an array of them."""
    if len(h.domain) == 0:
        raise PreconditionError("cannot extend from an empty domain")
    _check_lipschitz(space, h, C)
    q = np.atleast_1d(np.asarray(query, dtype=np.intp))
    for i in q:
        space.check_index(i)
    vals = (h.values[None, :] + C * space.distances(q, space.indices(h.domain))).min(axis=1)
    return float(vals[0]) if np.ndim(query) == 0 else vals


def inf_conv_approx(space: FiniteMetricSpace, f: SampledFunction, j: float, query) -> np.ndarray | float:
    """f_j(x) = min over y of f(y) + j d(x, y), with f given on the whole space."""
    if len(f.domain) != space.n:
        raise PreconditionError("f must be sampled at every point of the space")
    if j < 0:
        raise PreconditionError(f"j must be nonnegative, got {j}")
    q = np.atleast_1d(np.asarray(query, dtype=np.intp))
    for i in q:
        space.check_index(i)
    vals = (f.values[None, :] + j * space.distances(q, np.arange(space.n))).min(axis=1)
    return float(vals[0]) if np.ndim(query) == 0 else vals


def pushforward_cover(space_src: FiniteMetricSpace, space_dst: FiniteMetricSpace, f, cover,
                      alpha: float, C: float) -> CoveringEstimate:
    """Image cover {f(A_i)}; its alpha-sum is at most C^alpha times the source sum.

    ``f`` maps source indices to destination indices (a sequence or dict).
    """
    cover = SetFamily(tuple(as_subset(m) for m in cover))
    covered = cover.union()
    fmap = dict(f) if isinstance(f, dict) else dict(enumerate(f))
    missing = [i for i in covered if i not in fmap]
    if missing:
        raise PreconditionError(f"mapping undefined at source points {missing[:5]}")
    if len(covered) >= 2:
        src = space_src.indices(covered)
        dst = np.array([fmap[i] for i in src.tolist()])
        Ds = space_src.distances(src, src)
        Dd = space_dst.distances(dst, dst)
        if np.any(Dd > C * Ds * (1 + LIP_RTOL) + LIP_RTOL * Ds):
            raise PreconditionError(f"mapping is not {C}-Lipschitz on the covered points")
    image = SetFamily(tuple(SubsetRef.of(fmap[i] for i in m) for m in cover))
    value = hausdorff_sum(space_dst, image, alpha)
    return CoveringEstimate(float(alpha), math.inf, image, value, "greedy", "image of a source cover")


@dataclass(frozen=True)
class LevelProfile:
    alpha: float
    t: float
    phi: StepFunction
    superlevel_intervals: tuple[IntervalSpec, ...]
    superlevel_length: float
    bound: float

    @property
    def phi_breakpoints(self) -> np.ndarray:
        return self.phi.breakpoints

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "t": self.t,
            "phi_breakpoints": self.phi_breakpoints.tolist(),
            "phi_terms": self.phi.to_json(),
            "superlevel_intervals": [J.to_json() for J in self.superlevel_intervals],
            "superlevel_length": self.superlevel_length,
            "bound": self.bound,
        }


def level_profile(space: FiniteMetricSpace, cover, f: SampledFunction, alpha: float, C: float,
                  t: float, pad: float | None = None) -> LevelProfile:
    """Step function phi = sum (diam V_i)^(alpha-1) 1_{J_i} over open J_i
    slightly wider than f(V_i), its superlevel set {phi > t} and the bound
    t^-1 sum (diam V_i)^(alpha-1) |J_i|.

    ``pad`` widens every J_i in total; it defaults to 1e-12 times the spread
    of f (or 1e-12 when f is constant).
    """
    if alpha < 1:
        raise PreconditionError(f"alpha must be at least 1, got {alpha}")
    if not t > 0:
        raise PreconditionError(f"t must be positive, got {t}")
    members = [as_subset(m) for m in cover]
    if not members:
        raise PreconditionError("cover is empty")
    _check_lipschitz(space, f, C)
    vals = f.value_map()
    covered = set(i for m in members for i in m)
    if not set(f.domain.indices) <= covered:
        raise PreconditionError("cover does not cover the domain of f")
    if pad is None:
        spread = float(f.values.max() - f.values.min())
        pad = 1e-12 * spread if spread > 0 else 1e-12
    terms = []
    for m in members:
        image = [vals[i] for i in m if i in vals]
        if not image:
            continue
        d = diameter(space, m)
        weight = 1.0 if alpha == 1 else d ** (alpha - 1)
        if weight == 0:
            continue
        terms.append((IntervalSpec.open(min(image) - pad / 2, max(image) + pad / 2), weight))
    phi = StepFunction(tuple(terms))
    cheb = step_chebyshev(phi, t)
    return LevelProfile(float(alpha), float(t), phi, cheb.superlevel, cheb.length, cheb.bound)
