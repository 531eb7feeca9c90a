"""Slow, independent reference computations used to check the library."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


def brute_content(D, idx, alpha, delta=math.inf):
    """Minimum alpha-sum over partitions of idx into blocks of diameter < delta.

    Restricting to partitions loses nothing: shrinking a cover member never
    increases its diameter.
    """
    best = math.inf
    for part in set_partitions(idx):
        total = 0.0
        for block in part:
            d = max((D[i][j] for i in block for j in block), default=0.0)
            if d >= delta:
                break
            total += 1.0 if alpha == 0 else d ** alpha
        else:
            best = min(best, total)
    return best


def exact_cantor_points(ratio: Fraction, depth: int):
    """Endpoints of the level-``depth`` intervals, in exact arithmetic."""
    ivs = [(Fraction(0), Fraction(1))]
    for _ in range(depth):
        nxt = []
        for a, b in ivs:
            w = (b - a) * ratio
            nxt += [(a, a + w), (b - w, b)]
        ivs = nxt
    return sorted({x for iv in ivs for x in iv})


def exact_box_count(points, s: Fraction) -> int:
    return len({math.floor(p / s) for p in points})


def brute_hausdorff(P, Q):
    def directed(A, B):
        return max(min(math.dist(a, b) for b in B) for a in A)

    return max(directed(P, Q), directed(Q, P))


def brute_mcshane(D, dom, vals, C, x):
    return min(v + C * D[x][y] for y, v in zip(dom, vals))


def sweep_union_length(intervals):
    """Length of a union of (lo, hi) pairs."""
    total, cur_lo, cur_hi = 0.0, None, None
    for lo, hi in sorted(intervals):
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return total


def pairs(n):
    return itertools.combinations(range(n), 2)


def random_monotone_nodes(rng, k=None):
    """Nodes (x, mu(x-), mu(x+)) of a random nondecreasing step+linear function."""
    k = int(rng.integers(1, 7)) if k is None else k
    xs = np.sort(rng.choice(np.arange(-20, 21) / 4, size=k, replace=False))
    nodes, y = [], float(rng.uniform(-1, 1))
    for x in xs:
        y += float(rng.uniform(0, 1)) * (rng.random() < 0.7)  # continuous rise into x
        jump = float(rng.uniform(0, 1)) * (rng.random() < 0.5)
        nodes.append((float(x), y, y + jump))
        y += jump
    if nodes[-1][2] == nodes[0][1]:  # keep it nonconstant
        x, lo, hi = nodes[-1]
        nodes[-1] = (x, lo, hi + 0.5)
    return nodes


def in_maximal_superlevel(nodes, t, x):
    """Whether some open (u, v) around x has (mu(v-) - mu(u+)) > t (v - u).

    mu is piecewise linear between nodes and constant outside, so both
    one-sided extremes are reached at nodes or in the limit at x.
    """
    xs = [n[0] for n in nodes]

    def limits(z):
        for xn, ym, yp in nodes:
            if z == xn:
                return ym, yp
        if z < xs[0]:
            return nodes[0][1], nodes[0][1]
        if z > xs[-1]:
            return nodes[-1][2], nodes[-1][2]
        for (x0, _, y0), (x1, y1, _) in zip(nodes, nodes[1:]):
            if x0 < z < x1:
                v = y0 + (y1 - y0) * (z - x0) / (x1 - x0)
                return v, v
        raise AssertionError

    lo_x, hi_x = limits(x)
    # a node inside (u, v) contributes its whole jump, hence yp on the right, ym on the left
    sup_right = max([hi_x - t * x] + [yp - t * xn for xn, _, yp in nodes if xn > x])
    inf_left = min([lo_x - t * x] + [ym - t * xn for xn, ym, _ in nodes if xn < x])
    return sup_right > inf_left
