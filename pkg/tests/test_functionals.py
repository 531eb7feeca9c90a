import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fractalkit.cantor import CantorSpec, cantor_integral, cantor_levels
from fractalkit.errors import PreconditionError
from fractalkit.functionals import (
    DiscreteFunctional,
    Domain,
    character,
    convolve,
    convolve_character,
    convolve_fn,
    evaluate,
    evaluate_iterated,
    fourier,
    functional_maximal_bound,
    merged,
    product,
    support,
    to_stieltjes,
    weak_convergence_check,
)
from fractalkit.metric import FiniteMetricSpace, diameter
from fractalkit.realline import stieltjes_integral

seeds = st.integers(0, 10**6)
R1, R2, T1, Z1 = Domain("R", 1), Domain("R", 2), Domain("T", 1), Domain("Z", 1)


def random_functional(rng, dom, k=10):
    if dom.kind == "Z":
        pts = rng.integers(-5, 6, (k, dom.n)).astype(float)
    elif dom.kind == "T":
        pts = rng.uniform(0, 1, (k, dom.n))
    else:
        pts = rng.normal(size=(k, dom.n))
    return DiscreteFunctional(dom, pts, rng.uniform(0, 1, k))


def random_frequency(rng, dom):
    if dom.kind == "R":
        return rng.normal(scale=2, size=dom.n)
    if dom.kind == "T":
        return rng.integers(-6, 7, dom.n).astype(float)
    return rng.uniform(-1, 1, dom.n)


def same_atoms(a, b):
    return np.array_equal(a.points, b.points) and np.array_equal(a.weights, b.weights)


class TestEvaluate:
    def test_dirac(self):
        assert evaluate(DiscreteFunctional.dirac(R1, [0.3]), lambda x: x * 10) == 3

    @given(seeds)
    def test_linear_positive_bounded(self, seed):
        rng = np.random.default_rng(seed)
        lam = random_functional(rng, R1)
        f, g = np.sin, np.cos
        lhs = evaluate(lam, lambda x: 2 * f(x) - 3 * g(x))
        assert lhs == pytest.approx(2 * evaluate(lam, f) - 3 * evaluate(lam, g), abs=1e-12)
        assert evaluate(lam, lambda x: x * x) >= 0
        assert abs(evaluate(lam, f)) <= evaluate(lam, lambda x: abs(f(x))) + 1e-15
        assert abs(evaluate(lam, f)) <= lam.mass * max(abs(f(p)) for p, _ in lam.atoms()) + 1e-15

    def test_negative_weight_rejected(self):
        with pytest.raises(PreconditionError):
            DiscreteFunctional(R1, [[0.0]], [-1.0])


class TestSupport:
    def test_single_and_zero_weight(self):
        lam = DiscreteFunctional(R1, [[0.0], [1.0], [1.0]], [0.0, 0.5, 0.25])
        assert support(lam).tolist() == [[1.0]]
        assert merged(lam).weights.tolist() == [0.75]

    def test_torus_merge(self):
        lam = DiscreteFunctional(T1, [[0.25], [1.25], [-0.75]], [1, 1, 1])
        assert support(lam).tolist() == [[0.25]]


class TestProduct:
    def test_diracs(self):
        p = product(DiscreteFunctional.dirac(R1, [1.0]), DiscreteFunctional.dirac(R1, [2.0]))
        assert p.points.tolist() == [[1.0, 2.0]] and p.weights.tolist() == [1.0]

    @given(seeds)
    def test_support_and_factorization(self, seed):
        rng = np.random.default_rng(seed)
        a, b = random_functional(rng, R1, 4), random_functional(rng, R1, 5)
        p = product(a, b)
        sa, sb = support(a)[:, 0], support(b)[:, 0]
        want = sorted((x, y) for x in sa for y in sb)
        assert sorted(map(tuple, support(p).tolist())) == want
        sep = evaluate(p, lambda z: np.sin(z[0]) * np.exp(z[1]))
        assert sep == pytest.approx(evaluate(a, np.sin) * evaluate(b, np.exp), abs=1e-12)
        phi = lambda x, y: math.cos(x * y) + x ** 3 * y
        assert evaluate_iterated(a, b, phi, "first") == pytest.approx(evaluate_iterated(a, b, phi, "second"),
                                                                       abs=1e-12)


class TestConvolution:
    def test_dirac_translation(self):
        f = lambda x: x ** 2
        assert convolve_fn(DiscreteFunctional.dirac(R1, [0.0]), f, 1.7) == f(1.7)
        assert convolve_fn(DiscreteFunctional.dirac(R1, [0.5]), f, 1.7) == pytest.approx(f(1.2))

    def test_dirac_sum(self):
        c = convolve(DiscreteFunctional.dirac(Z1, [2]), DiscreteFunctional.dirac(Z1, [-5]))
        assert c.points.tolist() == [[-3.0]] and c.weights.tolist() == [1.0]

    @given(seeds, st.sampled_from(["R1", "R2", "T1", "Z1"]))
    def test_commutative_mass_associative(self, seed, which):
        dom = {"R1": R1, "R2": R2, "T1": T1, "Z1": Z1}[which]
        rng = np.random.default_rng(seed)
        a, b = random_functional(rng, dom, 6), random_functional(rng, dom, 7)
        ab, ba = convolve(a, b), convolve(b, a)
        assert same_atoms(ab, ba) or dom.kind != "Z" and np.allclose(ab.points, ba.points)
        assert ab.mass == pytest.approx(a.mass * b.mass, rel=1e-14)
        f = (lambda x: math.cos(2 * math.pi * x)) if dom.n == 1 else (lambda x: math.cos(x[0]) * x[1])
        y = rng.uniform(0, 1, dom.n)
        lhs = convolve_fn(ab, f, y)
        rhs = convolve_fn(a, lambda z: convolve_fn(b, f, z), y)
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_domain_mismatch(self):
        with pytest.raises(PreconditionError):
            convolve(DiscreteFunctional.dirac(R1, [0]), DiscreteFunctional.dirac(Z1, [0]))


class TestFourier:
    def test_diracs(self):
        assert fourier(DiscreteFunctional.dirac(R1, [0.0]), [3.3]).value == 1
        v = fourier(DiscreteFunctional.dirac(R1, [0.2]), [1.5]).value
        assert abs(v - cmath.exp(-2j * math.pi * 0.3)) < 1e-15

    @given(seeds)
    def test_conjugate_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        lam = random_functional(rng, R2)
        w = rng.normal(size=2)
        assert abs(fourier(lam, -w).value - fourier(lam, w).value.conjugate()) < 1e-12

    @given(seeds, st.sampled_from(["R2", "T1", "Z1"]))
    def test_eigenrelation_and_convolution_theorem(self, seed, which):
        dom = {"R2": R2, "T1": T1, "Z1": Z1}[which]
        rng = np.random.default_rng(seed)
        a, b = random_functional(rng, dom), random_functional(rng, dom)
        w = random_frequency(rng, dom)
        y = rng.uniform(-1, 1, dom.n)
        lhs = convolve_character(a, w, y)
        rhs = fourier(a, w).value * character(w)(y)
        assert abs(lhs - rhs) < 1e-12
        prod = fourier(a, w).value * fourier(b, w).value
        assert abs(fourier(convolve(a, b), w).value - prod) < 1e-12

    def test_torus_needs_integer_frequency(self):
        with pytest.raises(PreconditionError):
            fourier(DiscreteFunctional.dirac(T1, [0.1]), [0.5])


class TestWeakConvergence:
    def test_converging_diracs(self):
        target = DiscreteFunctional.dirac(R1, [0.0])
        seq = [DiscreteFunctional.dirac(R1, [1 / j]) for j in range(1, 30)]
        tests = [np.sin, lambda x: abs(x), lambda x: max(0.0, 1 - abs(x))]
        dev = weak_convergence_check(seq, target, tests)
        assert dev[-1] < 0.05 and dev[-1] < dev[0]

    def test_non_converging_diracs(self):
        target = DiscreteFunctional.dirac(R1, [0.0])
        seq = [DiscreteFunctional.dirac(R1, [(-1) ** j]) for j in range(1, 30)]
        dev = weak_convergence_check(seq, target, [lambda x: max(0.0, 1 - abs(x))])
        assert min(dev) == 1.0

    def test_constant_sequence(self):
        lam = random_functional(np.random.default_rng(3), R1)
        assert weak_convergence_check([lam, lam], lam, [np.cos]) == [0.0, 0.0]


class TestStieltjesBridge:
    def test_dirac(self):
        mu = to_stieltjes(DiscreteFunctional.dirac(R1, [0.0]))
        assert mu.limits(0.0) == (0.0, 1.0)
        assert stieltjes_integral(np.cos, mu, -1, 1) == pytest.approx(1.0, abs=1e-12)

    def test_two_atoms(self):
        lam = DiscreteFunctional(R1, [[0.0], [1.0]], [1.0, 2.0])
        mu = to_stieltjes(lam)
        assert mu.B - mu.A == lam.mass == 3
        assert [j for _, j in zip(mu.xs, mu.yp - mu.ym)] == [1.0, 2.0]

    def test_cantor_atoms_match_cantor_integral(self):
        spec = CantorSpec.constant(1 / 3)
        lev = cantor_levels(spec, 12)
        lam = DiscreteFunctional(R1, lev.left[:, None], np.full(len(lev), 1 / len(lev)))
        for f in (lambda x: 1.0, lambda x: x, lambda x: x * x):
            assert evaluate(lam, f) == pytest.approx(cantor_integral(spec, f, 12), abs=1e-6)


class TestMetricMaximal:
    def test_single_atom_uses_smallest_positive_ball(self):
        sp = FiniteMetricSpace.euclidean(np.array([[0.0], [1.0], [3.0]]))
        lam = DiscreteFunctional(Domain("abstract", space=sp), [[0]], [1.0])
        res = functional_maximal_bound(lam, 1.0, 0.5)
        # best ball around the atom has diameter 1, ratio 1 at points 0 and 1
        assert res.values[0] == pytest.approx(1.0) and res.values[1] == pytest.approx(1.0)
        assert list(res.K) == [0, 1]
        assert res.content.value <= res.bound

    def test_high_threshold_empty(self):
        sp = FiniteMetricSpace.euclidean(np.array([[0.0], [1.0], [3.0]]))
        lam = DiscreteFunctional(Domain("abstract", space=sp), [[0]], [1.0])
        assert len(functional_maximal_bound(lam, 1.0, 1.01).K) == 0

    @given(seeds, st.sampled_from([0.5, 1.0, 2.0]), st.floats(0.2, 5))
    def test_bound(self, seed, alpha, t):
        rng = np.random.default_rng(seed)
        sp = FiniteMetricSpace.euclidean(rng.uniform(0, 1, (30, 2)))
        lam = DiscreteFunctional(Domain("abstract", space=sp), rng.integers(0, 30, (6, 1)), rng.uniform(0, 1, 6))
        res = functional_maximal_bound(lam, alpha, t)
        assert res.content.value <= res.bound * (1 + 1e-12)
        covered = set().union(*map(set, res.content.cover.members)) if len(res.K) else set()
        assert set(res.K) <= covered
        for x, w in zip(res.K, res.witnesses):
            assert x in w and diameter(sp, w) > 0
