"""Hausdorff distance between nonempty finite sets.

For finite sets the infimum over t-closeness is attained by the symmetric
max-min expression, which is what gets computed.  The KD-tree path only
narrows the candidate pairs; distances are always recomputed with the same
arithmetic as the brute-force path, so both agree bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import PreconditionError
from .metric import (
    FiniteMetricSpace,
    SubsetRef,
    as_subset,
    diameter,
    dist_to_set_all,
    epsilon_components,
    euclidean_block,
)


@dataclass(frozen=True)
class HausdorffResult:
    distance: float
    argmax_pair: tuple[int, int]

    def to_json(self) -> dict:
        return {"distance": self.distance, "argmax_pair": list(self.argmax_pair)}


def _nonempty(space, E, name) -> np.ndarray:
    idx = space.indices(E)
    if idx.size == 0:
        raise PreconditionError(f"{name} is empty")
    return idx


def _directed(D: np.ndarray):
    """max over rows of the row minimum, with (row, col) attaining it."""
    near = D.argmin(axis=1)
    vals = D[np.arange(D.shape[0]), near]
    i = int(vals.argmax())
    return float(vals[i]), i, int(near[i])


DENSE_PAIR_LIMIT = 4_000_000


def hausdorff_distance(space: FiniteMetricSpace, E1, E2) -> HausdorffResult:
    a = _nonempty(space, E1, "E1")
    b = _nonempty(space, E2, "E2")
    if space.is_euclidean and space.snowflake_exponent == 1.0 and a.size * b.size > DENSE_PAIR_LIMIT:
        # same arithmetic as the dense block, so the answer does not depend on the path
        r = cloud_hausdorff(space.points[a], space.points[b])
        i, j = r.argmax_pair
        return HausdorffResult(r.distance, (int(a[i]), int(b[j])))
    D = space.distances(a, b)
    d12, i, j = _directed(D)
    d21, j2, i2 = _directed(D.T)
    if d12 >= d21:
        return HausdorffResult(d12, (int(a[i]), int(b[j])))
    return HausdorffResult(d21, (int(a[i2]), int(b[j2])))


def is_t_close(space: FiniteMetricSpace, E1, E2, t: float) -> bool:
    """Every point of each set lies at distance < t from the other set."""
    if not t > 0:
        raise PreconditionError(f"t must be positive, got {t}")
    a = _nonempty(space, E1, "E1")
    b = _nonempty(space, E2, "E2")
    D = space.distances(a, b)
    return bool(np.all(D.min(axis=1) < t) and np.all(D.min(axis=0) < t))


def embedding_identity_check(space: FiniteMetricSpace, E1, E2) -> tuple[float, float]:
    """(D(E1, E2), max over the ground set of |dist(x, E1) - dist(x, E2)|)."""
    _nonempty(space, E1, "E1")
    _nonempty(space, E2, "E2")
    lhs = hausdorff_distance(space, E1, E2).distance
    rhs = float(np.abs(dist_to_set_all(space, E1) - dist_to_set_all(space, E2)).max())
    return lhs, rhs


def _cloud(P) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.ndim != 2 or P.shape[0] == 0:
        raise PreconditionError("point cloud must be a nonempty (n, dim) array")
    return P


def _directed_brute(P, Q, chunk=1_000_000):
    best, arg = -1.0, (0, 0)
    step = max(1, chunk // Q.shape[0])
    for s in range(0, P.shape[0], step):
        D = euclidean_block(P[s:s + step], Q)
        d, i, j = _directed(D)
        if d > best:
            best, arg = d, (s + i, j)
    return best, arg


def cloud_hausdorff_brute(P, Q) -> HausdorffResult:
    """Hausdorff distance between two coordinate arrays, all pairs."""
    P, Q = _cloud(P), _cloud(Q)
    d12, (i, j) = _directed_brute(P, Q)
    d21, (j2, i2) = _directed_brute(Q, P)
    if d12 >= d21:
        return HausdorffResult(d12, (i, j))
    return HausdorffResult(d21, (i2, j2))


def _directed_tree(P, Q, tree: cKDTree):
    approx, _ = tree.query(P)
    # every pair the tree could have misranked lies within a hair of its answer
    radius = approx * (1 + 1e-9) + 1e-300
    best, arg = -1.0, (0, 0)
    for i, cands in enumerate(tree.query_ball_point(P, radius)):
        cands = np.sort(np.asarray(cands, dtype=np.intp))
        row = euclidean_block(P[i:i + 1], Q[cands])[0]
        k = int(row.argmin())
        if row[k] > best:
            best, arg = float(row[k]), (i, int(cands[k]))
    return best, arg


def cloud_hausdorff(P, Q) -> HausdorffResult:
    """KD-tree accelerated Hausdorff distance; identical output to the brute path."""
    P, Q = _cloud(P), _cloud(Q)
    if P.shape[1] != Q.shape[1]:
        raise PreconditionError("point clouds differ in dimension")
    d12, (i, j) = _directed_tree(P, Q, cKDTree(Q))
    d21, (j2, i2) = _directed_tree(Q, P, cKDTree(P))
    if d12 >= d21:
        return HausdorffResult(d12, (i, j))
    return HausdorffResult(d21, (i2, j2))


@dataclass(frozen=True)
class SetSequence:
    sets: tuple[SubsetRef, ...]
    decreasing: bool = True

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(as_subset(s) for s in self.sets))


def decreasing_limit(space: FiniteMetricSpace, seq: SetSequence):
    """Intersection K of a nested sequence and the distances D(K_j, K)."""
    if not seq.decreasing:
        raise PreconditionError("only sequences flagged decreasing have a computed limit")
    sets = list(seq.sets)
    if not sets:
        raise PreconditionError("sequence is empty")
    for j, (big, small) in enumerate(zip(sets, sets[1:])):
        if not small.issubset(big):
            raise PreconditionError(f"set {j + 1} is not contained in set {j}")
    for j, s in enumerate(sets):
        _nonempty(space, s, f"set {j}")
    limit = sets[-1]
    for s in sets:
        limit = limit.intersection(s)
    if len(limit) == 0:
        raise PreconditionError("the sets have empty intersection")
    return limit, [hausdorff_distance(space, s, limit).distance for s in sets]


@dataclass(frozen=True)
class TransferResult:
    claimed: float
    verified: bool


def connectedness_transfer(space: FiniteMetricSpace, E, F, eps: float, t: float) -> TransferResult:
    """If E is eps-connected and F is t-close to E, F is (eps + 2t)-connected."""
    if len(epsilon_components(space, eps, E)) != 1:
        raise PreconditionError(f"E is not {eps}-connected")
    if not is_t_close(space, E, F, t):
        raise PreconditionError(f"E and F are not {t}-close")
    claimed = eps + 2 * t
    return TransferResult(claimed, len(epsilon_components(space, claimed, F)) == 1)


def diameter_gap(space, E1, E2) -> float:
    return abs(diameter(space, E1) - diameter(space, E2))
