import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fractalkit.errors import PreconditionError
from fractalkit.measure import (
    box_counts,
    content_upper_bound,
    covering_number,
    dimension_fit,
    grid_box_count,
    hausdorff_sum,
    measure_profile,
)
from fractalkit.metric import FiniteMetricSpace, SetFamily, SubsetRef

from oracles import brute_content


def line(*xs):
    return FiniteMetricSpace.euclidean(np.array(xs, dtype=float)[:, None])


def random_space(seed, n, dim=2):
    rng = np.random.default_rng(seed)
    return FiniteMetricSpace.euclidean(rng.uniform(0, 1, (n, dim)))


class TestHausdorffSum:
    def test_empty_family(self):
        assert hausdorff_sum(line(0, 1), SetFamily(()), 1.3) == 0

    def test_alpha_zero_counts_members(self):
        sp = line(0, 1, 2, 3)
        assert hausdorff_sum(sp, [[0], [1, 2], [3]], 0) == 3

    def test_square(self):
        assert hausdorff_sum(line(0, 2), [[0, 1]], 2) == 4


class TestCoveringNumber:
    def test_examples(self):
        assert covering_number(line(0, 1, 2), [0, 1, 2], 0.5) == 3
        assert covering_number(line(0, 0.05, 1), [0, 1, 2], 0.1) == 2
        assert covering_number(line(0, 0.05, 1), [0, 1, 2], 1.5) == 1

    def test_exact_limit(self, monkeypatch):
        sp = line(*range(6))
        with pytest.raises(PreconditionError):
            covering_number(sp, sp.all(), 1.5, exact_limit=4)
        monkeypatch.setenv("FRACTALKIT_EXACT_LIMIT", "3")
        with pytest.raises(PreconditionError):
            covering_number(sp, sp.all(), 1.5)


class TestContent:
    def test_alpha_zero_is_covering_number(self):
        sp = random_space(1, 9)
        for d in (0.1, 0.3, 0.7):
            est = content_upper_bound(sp, sp.all(), 0, d)
            assert est.value == covering_number(sp, sp.all(), d)

    def test_isolated_points_have_zero_content(self):
        sp = line(0, 1, 3, 7)
        assert content_upper_bound(sp, sp.all(), 0.5, 0.9).value == 0

    def test_interval_grid(self):
        sp = line(*np.linspace(0, 1, 1001))
        v = content_upper_bound(sp, sp.all(), 1, 0.05, mode="greedy").value
        assert 0.95 <= v <= 1.0

    def test_witness_is_a_valid_cover(self):
        sp = random_space(2, 10)
        est = content_upper_bound(sp, sp.all(), 1.5, 0.4)
        assert est.cover.union() == sp.all()
        assert all(np.max(sp.distances(m.array(), m.array())) < 0.4 for m in est.cover.members)
        assert est.value == pytest.approx(hausdorff_sum(sp, est.cover, 1.5), rel=1e-12)

    @given(st.integers(0, 10**6), st.integers(2, 7),
           st.sampled_from([0.0, 0.5, 1.0, 2.0]), st.sampled_from([0.2, 0.5, math.inf]))
    def test_exact_against_partition_oracle(self, seed, n, alpha, delta):
        sp = random_space(seed, n)
        D = sp.full_matrix().tolist()
        want = brute_content(D, list(range(n)), alpha, delta)
        got = content_upper_bound(sp, sp.all(), alpha, delta).value
        assert got == pytest.approx(want, rel=1e-12, abs=1e-15)

    @given(st.integers(0, 10**6), st.sampled_from([0.0, 1.0, 1.7]), st.floats(0.05, 1.0))
    def test_greedy_never_below_exact(self, seed, alpha, delta):
        sp = random_space(seed, 8)
        ex = content_upper_bound(sp, sp.all(), alpha, delta).value
        gr = content_upper_bound(sp, sp.all(), alpha, delta, mode="greedy").value
        assert gr >= ex - 1e-12

    @given(st.integers(0, 10**6), st.sampled_from([0.0, 0.5, 1.0]), st.floats(0.1, 1.0))
    def test_monotone_and_subadditive(self, seed, alpha, delta):
        rng = np.random.default_rng(seed)
        sp = random_space(seed, 9)
        E1 = SubsetRef.of(rng.choice(9, 4, replace=False))
        E2 = SubsetRef.of(rng.choice(9, 4, replace=False))
        v = lambda E: content_upper_bound(sp, E, alpha, delta).value
        assert v(E1) <= v(E1.union(E2)) + 1e-12
        assert v(E1.union(E2)) <= v(E1) + v(E2) + 1e-12

    @given(st.integers(0, 10**6), st.sampled_from([0.0, 0.7, 1.0]))
    def test_separated_additivity(self, seed, alpha):
        rng = np.random.default_rng(seed)
        a = rng.uniform(0, 1, (4, 2))
        b = rng.uniform(0, 1, (4, 2)) + [5.0, 0.0]
        sp = FiniteMetricSpace.euclidean(np.vstack([a, b]))
        E1, E2 = SubsetRef.of(range(4)), SubsetRef.of(range(4, 8))
        delta = 2.0  # below the separation of the two clusters
        v = lambda E: content_upper_bound(sp, E, alpha, delta).value
        assert v(E1.union(E2)) >= v(E1) + v(E2) - 1e-12

    def test_rejects_bad_parameters(self):
        sp = line(0, 1)
        with pytest.raises(PreconditionError):
            content_upper_bound(sp, sp.all(), -1)
        with pytest.raises(PreconditionError):
            content_upper_bound(sp, sp.all(), 1, 0)


class TestProfile:
    def test_counting_measure(self):
        sp = line(0, 0.3, 1.0, 2.5)
        prof = measure_profile(sp, sp.all(), 0, [0.5, 0.2, 0.1])
        assert prof[-1].value == 4

    def test_length_profile_greedy(self):
        # a finite grid has zero exact content for alpha > 0; the greedy
        # ball cover tracks the length of the sampled interval instead
        sp = line(*np.linspace(0, 1, 1001))
        vals = [e.value for e in measure_profile(sp, sp.all(), 1, [0.5, 0.2, 0.1], mode="greedy")]
        assert all(0.95 <= v <= 1.0 for v in vals)
        small = line(*np.linspace(0, 1, 13))
        assert measure_profile(small, small.all(), 1, [0.5, 0.2])[-1].value == 0.0

    def test_alpha_two_decays(self):
        sp = line(*np.linspace(0, 1, 201))
        vals = [e.value for e in measure_profile(sp, sp.all(), 2, [0.5, 0.1, 0.02], mode="greedy")]
        assert vals[0] > vals[1] > vals[2] and vals[2] < 0.05

    def test_schedule_must_decrease(self):
        with pytest.raises(PreconditionError):
            measure_profile(line(0, 1), [0, 1], 1, [0.1, 0.2])


class TestBoxCounting:
    def test_one_point(self):
        assert grid_box_count(np.array([[0.3, 0.7]]), 0.01) == 1

    def test_eleven_point_grid(self):
        assert grid_box_count(np.linspace(0, 1, 11)[:, None], 0.25) == 5

    def test_cantor_endpoint_counts_frozen(self):
        # exact rational count: each level-j interval meets its own cell and
        # its right endpoint starts the next one, giving 2^(j+1)
        from fractalkit.cantor import CantorSpec, cantor_sample
        pts = cantor_sample(CantorSpec.constant(1 / 3), 12)
        assert box_counts(pts, [3.0 ** -j for j in range(1, 13)]) == [2 ** (j + 1) for j in range(1, 13)]


class TestDimensionFit:
    def test_cantor_counts(self):
        sc = [3.0 ** -j for j in range(1, 11)]
        fit = dimension_fit(sc, [2 ** j for j in range(1, 11)])
        assert fit.slope == pytest.approx(math.log(2) / math.log(3), abs=1e-12)
        assert fit.r_squared > 0.9999 and fit.reliable

    def test_constant(self):
        fit = dimension_fit([1, 0.5, 0.25], [3, 3, 3])
        assert fit.slope == 0

    def test_unit_slope(self):
        sc = [2.0 ** -j for j in range(1, 8)]
        assert dimension_fit(sc, [2 ** j for j in range(1, 8)]).slope == pytest.approx(1.0, abs=1e-12)

    def test_noisy_fit_warns(self):
        fit = dimension_fit([1, 0.5, 0.25, 0.125], [1, 10, 2, 30])
        assert not fit.reliable and fit.warnings

    def test_table_columns(self):
        fit = dimension_fit([0.5, 0.25, 0.125], [2, 4, 8])
        s, c, x, y = fit.table()[0]
        assert (s, c) == (0.5, 2) and x == pytest.approx(math.log(2)) and y == pytest.approx(math.log(2))
