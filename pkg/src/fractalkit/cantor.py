"""Cantor sets built from a ratio sequence alpha_1, alpha_2, ... in (0, 1/2).

Each closed interval of level j spawns the two subintervals of relative length
alpha_{j+1} that share its endpoints.  Endpoints are carried through the
recurrence in double precision: a child's outer endpoint is copied from its
parent, so every endpoint keeps identical bits at all deeper levels.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import PreconditionError


@dataclass(frozen=True)
class CantorSpec:
    """Ratios given as an explicit prefix followed by a repeating tail."""

    prefix: tuple[float, ...] = ()
    tail: float = 1 / 3
    max_depth: int = 40

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(float(r) for r in self.prefix))
        for r in self.prefix + (float(self.tail),):
            if not 0 < r < 0.5:
                raise PreconditionError(f"ratio must be < 1/2 and > 0, got {r}")
        if int(self.max_depth) < 1:
            raise PreconditionError("max_depth must be a positive integer")

    @classmethod
    def constant(cls, ratio: float, max_depth: int = 40) -> "CantorSpec":
        return cls((), ratio, max_depth)

    def ratio(self, j: int) -> float:
        """alpha_j, counted from 1."""
        if j < 1:
            raise PreconditionError("ratios are indexed from 1")
        return self.prefix[j - 1] if j <= len(self.prefix) else float(self.tail)

    def check_depth(self, j: int) -> int:
        j = int(j)
        if not 0 <= j <= self.max_depth:
            raise PreconditionError(f"depth {j} outside 0..{self.max_depth}")
        return j

    def to_json(self) -> dict:
        return {"prefix": list(self.prefix), "tail": self.tail, "max_depth": self.max_depth}


@dataclass(frozen=True)
class CantorLevel:
    depth: int
    left: np.ndarray
    right: np.ndarray

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return list(zip(self.left.tolist(), self.right.tolist()))

    def __len__(self):
        return self.left.size


@dataclass(frozen=True)
class Membership:
    retained: bool
    discarded_at: int | None = None


def cantor_levels(spec: CantorSpec, j: int) -> CantorLevel:
    j = spec.check_depth(j)
    left = np.array([0.0])
    right = np.array([1.0])
    length = 1.0
    for k in range(1, j + 1):
        child = length * spec.ratio(k)
        new_left = np.empty(2 * left.size)
        new_right = np.empty(2 * left.size)
        new_left[0::2] = left
        new_right[0::2] = left + child
        new_left[1::2] = right - child
        new_right[1::2] = right
        left, right, length = new_left, new_right, child
    return CantorLevel(j, left, right)


def level_length(spec: CantorSpec, j: int) -> float:
    out = 1.0
    for k in range(1, spec.check_depth(j) + 1):
        out *= spec.ratio(k)
    return out


def cantor_membership(spec: CantorSpec, x: float, j: int) -> Membership:
    """Whether x survives the first j construction steps, else where it fell out."""
    j = spec.check_depth(j)
    if not 0.0 <= x <= 1.0:
        raise PreconditionError(f"x must lie in [0, 1], got {x}")
    lo, hi, length = 0.0, 1.0, 1.0
    for k in range(1, j + 1):
        child = length * spec.ratio(k)
        if lo <= x <= lo + child:
            hi = lo + child
        elif hi - child <= x <= hi:
            lo = hi - child
        else:
            return Membership(False, k)
        length = child
    return Membership(True)


def cantor_sample(spec: CantorSpec, j: int) -> np.ndarray:
    """Sorted endpoints of the level-j intervals (2^(j+1) points of the set)."""
    level = cantor_levels(spec, j)
    pts = np.empty(2 * len(level))
    pts[0::2] = level.left
    pts[1::2] = level.right
    return pts


@dataclass(frozen=True)
class PiecewiseLinearMap:
    """Increasing piecewise-linear map of [0, 1] onto itself."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.shape != ys.shape or xs.size < 2:
            raise PreconditionError("breakpoint arrays must match and hold at least 2 points")
        if xs[0] != 0 or ys[0] != 0 or xs[-1] != 1 or ys[-1] != 1:
            raise PreconditionError("map must send 0 to 0 and 1 to 1")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise PreconditionError("breakpoints must be strictly increasing in both coordinates")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __call__(self, x):
        return np.interp(x, self.xs, self.ys)

    def inverse(self) -> "PiecewiseLinearMap":
        return PiecewiseLinearMap(self.ys, self.xs)

    @property
    def breakpoints(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))


def cantor_homeomorphism(spec_a: CantorSpec, spec_b: CantorSpec, j: int) -> PiecewiseLinearMap:
    """The increasing map that is affine on each level-j interval and gap of
    spec_a and carries them, in order, onto those of spec_b."""
    if j > min(spec_a.max_depth, spec_b.max_depth):
        raise PreconditionError(
            f"depth {j} exceeds the depth both specs support "
            f"({spec_a.max_depth}, {spec_b.max_depth})"
        )
    return PiecewiseLinearMap(cantor_sample(spec_a, j), cantor_sample(spec_b, j))


def _evaluate(f: Callable, nodes: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray([f(float(x)) for x in nodes], dtype=float)
    except Exception as exc:  # noqa: BLE001 - surfaced with the failing context
        raise PreconditionError(f"integrand evaluation failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise PreconditionError("integrand returned a non-finite value")
    return vals


def cantor_integral(spec: CantorSpec, f: Callable, j: int, node_rule: str = "left") -> float:
    """2^-j times the sum of f over one endpoint of each level-j interval."""
    level = cantor_levels(spec, j)
    if node_rule == "left":
        nodes = level.left
    elif node_rule == "right":
        nodes = level.right
    else:
        raise PreconditionError(f"node_rule must be 'left' or 'right', got {node_rule!r}")
    return float(_evaluate(f, nodes).sum() / len(level))
