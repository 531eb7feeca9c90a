"""Finite metric spaces and the primitive geometry built on them.

Every set here is a finite set of point indices, so the infima and suprema of
the continuous theory become minima and maxima.  Comparisons are made in exact
floating-point order; no epsilon fuzz is applied to set-level decisions.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import PreconditionError

TRIANGLE_CHECK_LIMIT = 2000
_TRIANGLE_RTOL = 1e-12


def euclidean_block(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Distance matrix between the rows of P and Q.

    Coordinates are accumulated one axis at a time so that the same pair of
    points always produces the same bits, whichever routine asks for it.
    """
    P = np.atleast_2d(P)
    Q = np.atleast_2d(Q)
    acc = (P[:, None, 0] - Q[None, :, 0]) ** 2
    for k in range(1, P.shape[1]):
        acc = acc + (P[:, None, k] - Q[None, :, k]) ** 2
    return np.sqrt(acc)


@dataclass(frozen=True)
class SubsetRef:
    """Sorted, duplicate-free indices into a FiniteMetricSpace."""

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise PreconditionError("subset indices must be strictly increasing")
        if idx and idx[0] < 0:
            raise PreconditionError("subset indices must be nonnegative")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, items: Iterable[int]) -> "SubsetRef":
        return cls(tuple(sorted({int(i) for i in items})))

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i):
        return int(i) in set(self.indices)

    def array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)

    def union(self, other: "SubsetRef") -> "SubsetRef":
        return SubsetRef.of(self.indices + tuple(other))

    def intersection(self, other: "SubsetRef") -> "SubsetRef":
        return SubsetRef.of(set(self.indices) & set(other))

    def isdisjoint(self, other: "SubsetRef") -> bool:
        return set(self.indices).isdisjoint(other)

    def issubset(self, other: "SubsetRef") -> bool:
        return set(self.indices) <= set(other)


@dataclass(frozen=True)
class SetFamily:
    members: tuple[SubsetRef, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(as_subset(m) for m in self.members))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def union(self) -> SubsetRef:
        return SubsetRef.of(i for m in self.members for i in m)


def as_subset(A) -> SubsetRef:
    if isinstance(A, SubsetRef):
        return A
    return SubsetRef.of(np.asarray(list(A), dtype=np.int64).ravel().tolist())


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A finite metric space backed by coordinates or an explicit matrix.

    Use :meth:`euclidean` or :meth:`explicit` to build one.  The reported
    metric is ``d ** snowflake_exponent``.
    """

    points: np.ndarray | None = None
    matrix: np.ndarray | None = None
    snowflake_exponent: float = 1.0
    checked: bool = field(default=True, compare=False)

    def __post_init__(self):
        if (self.points is None) == (self.matrix is None):
            raise PreconditionError("exactly one of points or matrix must be given")
        a = float(self.snowflake_exponent)
        if not 0.0 < a <= 1.0:
            raise PreconditionError(f"snowflake exponent must lie in (0, 1], got {a}")
        if self.points is not None:
            P = np.array(self.points, dtype=float)
            if P.ndim == 1:
                P = P[:, None]
            if P.ndim != 2 or P.shape[0] == 0:
                raise PreconditionError("points must be a nonempty (n, dim) array")
            if not np.all(np.isfinite(P)):
                raise PreconditionError("point coordinates must be finite")
            P.setflags(write=False)
            object.__setattr__(self, "points", P)
        else:
            D = np.array(self.matrix, dtype=float)
            _validate_matrix(D, check_triangle=self.checked)
            D.setflags(write=False)
            object.__setattr__(self, "matrix", D)

    @classmethod
    def euclidean(cls, points) -> "FiniteMetricSpace":
        return cls(points=points)

    @classmethod
    def explicit(cls, matrix, check_triangle: bool | None = None) -> "FiniteMetricSpace":
        """Explicit distance matrix; the O(n^3) triangle check is skipped
        by default above ``TRIANGLE_CHECK_LIMIT`` points (the space is then
        reported as unchecked)."""
        n = len(matrix)
        if check_triangle is None:
            check_triangle = n <= TRIANGLE_CHECK_LIMIT
        return cls(matrix=matrix, checked=check_triangle)

    @property
    def n(self) -> int:
        src = self.points if self.points is not None else self.matrix
        return src.shape[0]

    @property
    def is_euclidean(self) -> bool:
        return self.points is not None

    @property
    def dim(self) -> int:
        if self.points is None:
            raise PreconditionError("explicit-matrix spaces have no coordinates")
        return self.points.shape[1]

    def all(self) -> SubsetRef:
        return SubsetRef(tuple(range(self.n)))

    def check_index(self, i) -> int:
        i = int(i)
        if not 0 <= i < self.n:
            raise PreconditionError(f"point index {i} out of range for {self.n} points")
        return i

    def indices(self, A) -> np.ndarray:
        idx = as_subset(A).array()
        if idx.size and idx[-1] >= self.n:
            raise PreconditionError(f"point index {idx[-1]} out of range for {self.n} points")
        return idx

    def distances(self, I, J) -> np.ndarray:
        """Block of the (snowflaked) metric between index arrays I and J."""
        I = np.asarray(I, dtype=np.intp)
        J = np.asarray(J, dtype=np.intp)
        if self.points is not None:
            D = euclidean_block(self.points[I], self.points[J])
        else:
            D = self.matrix[np.ix_(I, J)]
        if self.snowflake_exponent != 1.0:
            D = D ** self.snowflake_exponent
        return D

    def d(self, i: int, j: int) -> float:
        return float(self.distances([self.check_index(i)], [self.check_index(j)])[0, 0])

    def full_matrix(self) -> np.ndarray:
        idx = np.arange(self.n)
        return self.distances(idx, idx)


def _validate_matrix(D: np.ndarray, check_triangle: bool) -> None:
    if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] == 0:
        raise PreconditionError("distance matrix must be square and nonempty")
    if not np.all(np.isfinite(D)):
        raise PreconditionError("distance matrix entries must be finite")
    n = D.shape[0]
    if np.any(np.diag(D) != 0):
        i = int(np.flatnonzero(np.diag(D) != 0)[0])
        raise PreconditionError(f"d({i},{i}) must be 0")
    off = ~np.eye(n, dtype=bool)
    if np.any(D[off] <= 0):
        i, j = np.argwhere((D <= 0) & off)[0]
        raise PreconditionError(f"d({i},{j}) must be positive for distinct points")
    if not np.array_equal(D, D.T):
        i, j = np.argwhere(D != D.T)[0]
        raise PreconditionError(f"matrix is not symmetric at ({i},{j})")
    if check_triangle:
        for y in range(n):
            via = D[:, y][:, None] + D[y, :][None, :]
            bad = D > via * (1 + _TRIANGLE_RTOL)
            if bad.any():
                x, z = np.argwhere(bad)[0]
                raise PreconditionError(
                    f"triangle inequality fails for triple ({x}, {y}, {z}): "
                    f"d({x},{z})={D[x, z]} > d({x},{y})+d({y},{z})={via[x, z]}"
                )


def diameter(space: FiniteMetricSpace, A) -> float:
    idx = space.indices(A)
    if idx.size < 2:
        return 0.0
    return float(space.distances(idx, idx).max())


def dist_to_set(space: FiniteMetricSpace, x: int, A) -> float:
    idx = space.indices(A)
    if idx.size == 0:
        raise PreconditionError("distance to the empty set is undefined")
    return float(space.distances([space.check_index(x)], idx).min())


def dist_to_set_all(space: FiniteMetricSpace, A, X=None) -> np.ndarray:
    """dist(x, A) for every x in X (default: the whole ground set)."""
    idx = space.indices(A)
    if idx.size == 0:
        raise PreconditionError("distance to the empty set is undefined")
    X = np.arange(space.n) if X is None else space.indices(X)
    out = np.empty(X.size)
    step = max(1, 4_000_000 // max(idx.size, 1))
    for s in range(0, X.size, step):
        out[s:s + step] = space.distances(X[s:s + step], idx).min(axis=1)
    return out


def neighborhood(space: FiniteMetricSpace, A, r: float) -> SubsetRef:
    """All points at distance < r from A."""
    if not r > 0:
        raise PreconditionError(f"neighborhood radius must be positive, got {r}")
    dist = dist_to_set_all(space, A)
    return SubsetRef(tuple(np.flatnonzero(dist < r).tolist()))


def with_snowflake(space: FiniteMetricSpace, a: float) -> FiniteMetricSpace:
    if not 0.0 < a <= 1.0:
        raise PreconditionError(f"snowflake exponent must lie in (0, 1], got {a}")
    return replace(space, snowflake_exponent=space.snowflake_exponent * a)


def epsilon_components(space: FiniteMetricSpace, eps: float, A=None) -> list[SubsetRef]:
    """Classes of the eps-chain relation (links of length strictly < eps).

    Classes are returned ordered by their smallest index.  ``A`` restricts the
    relation to a subset of the ground set.
    """
    if not eps > 0:
        raise PreconditionError(f"eps must be positive, got {eps}")
    idx = np.arange(space.n) if A is None else space.indices(A)
    if idx.size == 0:
        return []
    adj = space.distances(idx, idx) < eps
    _, labels = connected_components(csr_matrix(adj), directed=False)
    groups: dict[int, list[int]] = {}
    for i, lab in zip(idx.tolist(), labels.tolist()):
        groups.setdefault(lab, []).append(i)
    return sorted((SubsetRef(tuple(g)) for g in groups.values()), key=lambda s: s.indices[0])


def disconnectedness_profile(space: FiniteMetricSpace, deltas: Sequence[float], A=None):
    """(delta, largest diameter of a delta-component) for each delta."""
    deltas = list(deltas)
    if not deltas:
        raise PreconditionError("delta list is empty")
    out = []
    for delta in deltas:
        comps = epsilon_components(space, delta, A)
        out.append((float(delta), max((diameter(space, c) for c in comps), default=0.0)))
    return out


def enlargement(space: FiniteMetricSpace, E) -> SubsetRef:
    """Points within diam(E) of E (closed); diameter at most 3 diam(E)."""
    dist = dist_to_set_all(space, E)
    return SubsetRef(tuple(np.flatnonzero(dist <= diameter(space, E)).tolist()))


def greedy_disjoint_selection(space: FiniteMetricSpace, family) -> list[int]:
    """Repeatedly take the largest-diameter member disjoint from those taken.

    Ties go to the lowest family index.  Returns family indices in selection
    order.
    """
    members = [as_subset(m) for m in family]
    if not members:
        raise PreconditionError("family is empty")
    for k, m in enumerate(members):
        if len(m) == 0:
            raise PreconditionError(f"family member {k} is empty")
        space.indices(m)
    diam = [diameter(space, m) for m in members]
    order = sorted(range(len(members)), key=lambda k: (-diam[k], k))
    taken: set[int] = set()
    selected = []
    for k in order:
        if taken.isdisjoint(members[k].indices):
            selected.append(k)
            taken.update(members[k].indices)
    return selected
