"""Hausdorff-type sums, covering numbers, contents and dimension fits.

On a finite set countable and finite coverings coincide, so one estimator
serves every H/HF variant.  Exact mode minimises the sum over partitions of
the target into blocks of diameter < delta; greedy mode returns a witnessed
upper bound from ball covers.  Only upper bounds are ever certified, apart
from the exact values on small inputs.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from .errors import PreconditionError
from .metric import FiniteMetricSpace, SetFamily, SubsetRef, as_subset, diameter

DEFAULT_EXACT_LIMIT = 18
MODES = ("exact", "greedy")


def default_exact_limit() -> int:
    raw = os.environ.get("FRACTALKIT_EXACT_LIMIT")
    if raw is None:
        return DEFAULT_EXACT_LIMIT
    try:
        return int(raw)
    except ValueError:
        raise PreconditionError(f"FRACTALKIT_EXACT_LIMIT must be an integer, got {raw!r}")


def _term(diam: float, alpha: float, nonempty: bool = True) -> float:
    if alpha == 0:
        return 1.0 if nonempty else 0.0
    return diam ** alpha


@dataclass(frozen=True)
class CoveringEstimate:
    alpha: float
    delta: float
    cover: SetFamily
    value: float
    mode: str
    note: str = ""

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "delta": None if math.isinf(self.delta) else self.delta,
            "value": self.value,
            "mode": self.mode,
            "members": [list(m) for m in self.cover],
            "note": self.note,
        }


@dataclass(frozen=True)
class DimensionFit:
    scales: tuple[float, ...]
    counts: tuple[int, ...]
    slope: float
    intercept: float
    r_squared: float
    monotone: bool = True
    warnings: tuple[str, ...] = field(default=())

    @property
    def reliable(self) -> bool:
        return self.r_squared >= 0.99

    def table(self) -> list[tuple[float, int, float, float]]:
        return [(s, c, math.log(1 / s), math.log(c)) for s, c in zip(self.scales, self.counts)]


def hausdorff_sum(space: FiniteMetricSpace, cover, alpha: float) -> float:
    """Sum of diam(A)^alpha; for alpha = 0 each nonempty member counts 1."""
    if alpha < 0:
        raise PreconditionError(f"alpha must be nonnegative, got {alpha}")
    total = 0.0
    for member in cover:
        member = as_subset(member)
        total += _term(diameter(space, member), alpha, len(member) > 0)
    return total


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise PreconditionError(f"mode must be one of {MODES}, got {mode!r}")


def content_upper_bound(
    space: FiniteMetricSpace,
    E,
    alpha: float,
    delta: float = math.inf,
    mode: str = "exact",
    exact_limit: int | None = None,
) -> CoveringEstimate:
    """Witnessed cover of E by sets of diameter < delta and its alpha-sum."""
    if alpha < 0:
        raise PreconditionError(f"alpha must be nonnegative, got {alpha}")
    if not delta > 0:
        raise PreconditionError(f"delta must be positive, got {delta}")
    _check_mode(mode)
    idx = space.indices(E)
    if idx.size == 0:
        return CoveringEstimate(alpha, delta, SetFamily(()), 0.0, mode, "empty set")
    if mode == "exact":
        limit = default_exact_limit() if exact_limit is None else exact_limit
        if idx.size > limit:
            raise PreconditionError(
                f"exact mode is limited to {limit} points, got {idx.size}; use greedy mode"
            )
        blocks, value = _exact_partition(space, idx, alpha, delta)
        note = "exact minimum over covers"
    else:
        blocks = _greedy_cover(space, idx, delta)
        value = sum(_term(diameter(space, b), alpha) for b in blocks)
        note = "upper bound"
    return CoveringEstimate(float(alpha), float(delta), SetFamily(tuple(blocks)), float(value), mode, note)


def covering_number(space, E, delta: float, mode: str = "exact", exact_limit: int | None = None) -> int:
    """Least number of sets of diameter < delta covering E (greedy: upper bound)."""
    return int(round(content_upper_bound(space, E, 0.0, delta, mode, exact_limit).value))


def _ball_graph(space: FiniteMetricSpace, idx: np.ndarray, r: float):
    """Sparse boolean matrix of d < r among idx (diagonal included)."""
    m = idx.size
    if not space.is_euclidean or m <= 1024 or not math.isfinite(r):
        return sparse.csr_matrix(space.distances(idx, idx) < r)
    P = space.points[idx]
    # Euclidean radius for the snowflaked one, padded; pairs are re-checked exactly
    reach = r ** (1.0 / space.snowflake_exponent) * (1 + 1e-9)
    pairs = cKDTree(P).query_pairs(reach, output_type="ndarray")
    if pairs.size:
        d = np.sqrt(((P[pairs[:, 0]] - P[pairs[:, 1]]) ** 2).sum(axis=1))
        if space.snowflake_exponent != 1.0:
            d = d ** space.snowflake_exponent
        pairs = pairs[d < r]
    rows = np.concatenate((pairs[:, 0], pairs[:, 1], np.arange(m)))
    cols = np.concatenate((pairs[:, 1], pairs[:, 0], np.arange(m)))
    return sparse.csr_matrix((np.ones(rows.size, dtype=bool), (rows, cols)), shape=(m, m))


def _greedy_cover(space: FiniteMetricSpace, idx: np.ndarray, delta: float) -> list[SubsetRef]:
    # open balls of radius delta/2 around uncovered points; each has diameter < delta
    m = idx.size
    inball = _ball_graph(space, idx, delta / 2)
    indptr, nbrs = inball.indptr, inball.indices
    uncovered = np.ones(m, dtype=bool)
    counts = np.diff(indptr).astype(np.int64)
    blocks = []
    while uncovered.any():
        score = np.where(uncovered, counts, -1)
        c = int(np.argmax(score))
        ball = nbrs[indptr[c]:indptr[c + 1]]
        new = np.sort(ball[uncovered[ball]])
        blocks.append(SubsetRef(tuple(idx[new].tolist())))
        uncovered[new] = False
        hit = np.concatenate([nbrs[indptr[q]:indptr[q + 1]] for q in new])
        np.subtract.at(counts, hit, 1)
    return blocks


def _exact_partition(space, idx: np.ndarray, alpha: float, delta: float):
    """Branch and bound over partitions of idx into blocks of diameter < delta.

    Merging points into a block never helps a positive-alpha sum (singletons
    have diameter 0), so the search is driven by cost per covered point.  For
    alpha = 0 only maximal cliques of the < delta graph are branched on.
    """
    m = idx.size
    D = space.distances(idx, idx)
    close = D < delta
    np.fill_diagonal(close, False)
    nbr = [sum(1 << j for j in np.flatnonzero(close[i]).tolist()) for i in range(m)]
    diam_cache: dict[int, float] = {}

    def block_diam(mask: int) -> float:
        if mask not in diam_cache:
            members = _bits(mask)
            diam_cache[mask] = float(D[np.ix_(members, members)].max()) if len(members) > 1 else 0.0
        return diam_cache[mask]

    def cost(mask: int) -> float:
        return _term(block_diam(mask), alpha)

    greedy = _greedy_cover(space, idx, delta)
    pos = {g: k for k, g in enumerate(idx.tolist())}
    best_blocks = [sum(1 << pos[g] for g in b) for b in greedy]
    best = [sum(cost(b) for b in best_blocks), best_blocks]
    seen: dict[int, float] = {}

    def lower_bound(rem: int) -> float:
        if alpha > 0 or rem == 0:
            return 0.0
        # pairwise-far points need distinct blocks
        lb, pool = 0, rem
        while pool:
            p = pool & -pool
            lb += 1
            pool &= ~nbr[p.bit_length() - 1]
            pool &= ~p
        return float(lb)

    def candidates(p: int, rem: int):
        allowed = nbr[p] & rem & ~(1 << p)
        if alpha == 0:
            cl = list(_maximal_cliques(allowed, nbr))
            cl = [c | (1 << p) for c in cl] or [1 << p]
            cl.sort(key=lambda c: -c.bit_count())
            return cl
        # lazily, singleton first: a zero-cost block ends the search at once
        return ((1 << p) | c for c in _all_cliques(allowed, nbr))

    def search(rem: int, acc: float, chosen: list[int]):
        if rem == 0:
            if acc < best[0]:
                best[0], best[1] = acc, list(chosen)
            return
        if acc + lower_bound(rem) >= best[0]:
            return
        if seen.get(rem, math.inf) <= acc:
            return
        seen[rem] = acc
        p = (rem & -rem).bit_length() - 1
        for block in candidates(p, rem):
            if best[0] <= acc:
                break
            c = cost(block)
            if acc + c >= best[0]:
                continue
            chosen.append(block)
            search(rem & ~block, acc + c, chosen)
            chosen.pop()

    search((1 << m) - 1, 0.0, [])
    blocks = [SubsetRef(tuple(sorted(idx[_bits(b)].tolist()))) for b in best[1]]
    blocks.sort(key=lambda s: s.indices[0])
    return blocks, best[0]


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _maximal_cliques(allowed: int, nbr: list[int]):
    """Bron-Kerbosch with pivoting over the vertex bitmask ``allowed``."""

    def bk(R: int, P: int, X: int):
        if P == 0 and X == 0:
            yield R
            return
        if P == 0:
            return
        pu = max(_bits(P | X), key=lambda u: (P & nbr[u]).bit_count())
        for v in _bits(P & ~nbr[pu]):
            bit = 1 << v
            yield from bk(R | bit, P & nbr[v], X & nbr[v])
            P &= ~bit
            X |= bit

    if allowed == 0:
        return
    yield from bk(0, allowed, 0)


def _all_cliques(allowed: int, nbr: list[int]):
    """Every clique (including the empty one) inside ``allowed``."""

    def grow(R: int, P: int):
        yield R
        for v in _bits(P):
            bit = 1 << v
            P &= ~bit
            yield from grow(R | bit, P & nbr[v])

    yield from grow(0, allowed)


def default_schedule(space: FiniteMetricSpace, E) -> list[float]:
    """Geometric deltas, ratio 1/2, from diam(E) down to twice the least gap."""
    idx = space.indices(E)
    if idx.size < 2:
        return [1.0]
    D = space.distances(idx, idx)
    gap = float(D[D > 0].min())
    top = float(D.max())
    out = [top]
    while out[-1] / 2 >= 2 * gap:
        out.append(out[-1] / 2)
    return out


def measure_profile(space, E, alpha: float, delta_schedule=None, mode: str = "exact",
                    exact_limit: int | None = None) -> list[CoveringEstimate]:
    """Content estimates along a strictly decreasing delta schedule."""
    schedule = default_schedule(space, E) if delta_schedule is None else list(delta_schedule)
    if not schedule:
        raise PreconditionError("delta schedule is empty")
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise PreconditionError("delta schedule must be strictly decreasing")
    return [content_upper_bound(space, E, alpha, d, mode, exact_limit) for d in schedule]


def grid_box_count(points, s: float) -> int:
    """Occupied cells [k s, (k+1) s) of the origin-anchored grid.

    A coordinate within 1e-9 (relative) of a grid line is placed on that line,
    so lattice-aligned data is counted as in exact arithmetic.
    """
    if not s > 0:
        raise PreconditionError(f"box side must be positive, got {s}")
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.shape[0] == 0:
        return 0
    q = P / s
    near = np.rint(q)
    snap = np.abs(q - near) <= 1e-9 * np.maximum(1.0, np.abs(near))
    cells = np.where(snap, near, np.floor(q)).astype(np.int64)
    return int(np.unique(cells, axis=0).shape[0])


def box_counts(points, scales) -> list[int]:
    return [grid_box_count(points, s) for s in scales]


def covering_counts(space, E, scales, mode: str = "greedy") -> list[int]:
    return [covering_number(space, E, s, mode) for s in scales]


def dimension_fit(scales, counts) -> DimensionFit:
    """Least-squares slope of log(count) against log(1/scale)."""
    scales = [float(s) for s in scales]
    counts = [int(c) for c in counts]
    if len(scales) != len(counts):
        raise PreconditionError("scales and counts differ in length")
    if len(scales) < 3:
        raise PreconditionError("dimension fit needs at least 3 scale points")
    if any(c <= 0 for c in counts):
        raise PreconditionError("counts must be positive")
    if any(s <= 0 for s in scales):
        raise PreconditionError("scales must be positive")
    if any(b >= a for a, b in zip(scales, scales[1:])):
        raise PreconditionError("scales must be strictly decreasing")
    x = np.log(1 / np.asarray(scales))
    y = np.log(np.asarray(counts, dtype=float))
    xc = x - x.mean()
    yc = y - y.mean()
    slope = float(xc @ yc / (xc @ xc))
    intercept = float(y.mean() - slope * x.mean())
    ss_tot = float(yc @ yc)
    resid = y - (intercept + slope * x)
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - float(resid @ resid) / ss_tot)
    monotone = all(b >= a for a, b in zip(counts, counts[1:]))
    warnings = []
    if r2 < 0.99:
        warnings.append(f"unreliable fit: r^2 = {r2:.4f} < 0.99")
    if not monotone:
        warnings.append("counts are not nondecreasing as the scale shrinks")
    return DimensionFit(tuple(scales), tuple(counts), slope, intercept, r2, monotone, tuple(warnings))
