import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simustab.errors import DegreeError, PoleEvaluation, ShapeError, SingularMatrix
from simustab.ratmat import (Polynomial, RationalFunction, RationalMatrix, poly_roots,
                             rm_arith, rm_det_adj, rm_eval)

from conftest import random_rm

SAMPLES = np.array([0.3 + 0.7j, 1.1 - 0.2j, 2.0 + 2.0j, -0.1 + 1.5j,
                    0.05 - 3.0j, 4.0 + 0.1j, 0.9 + 0.9j, 3.3 - 1.7j])


def rel(a, b):
    return np.linalg.norm(a - b) / max(1.0, np.linalg.norm(b))


class TestPolynomial:
    def test_trailing_zeros_trimmed(self):
        p = Polynomial([1.0, 2.0, 0.0, 0.0])
        assert p.degree == 1
        assert Polynomial([0.0, 0.0]).is_zero
        assert Polynomial([0.0]).degree == -1

    def test_arithmetic_matches_numpy(self, rng):
        a, b = rng.normal(size=4), rng.normal(size=3)
        pa, pb = Polynomial(a), Polynomial(b)
        s = 0.4 - 1.3j
        assert np.isclose((pa * pb)(s), np.polyval(a[::-1], s) * np.polyval(b[::-1], s))
        assert np.isclose((pa + pb)(s), np.polyval(a[::-1], s) + np.polyval(b[::-1], s))
        q, r = divmod(pa, pb)
        assert np.allclose((q * pb + r).coeffs, a)

    def test_exact_cancellation_drops_degree(self):
        p = Polynomial([1.0, 2.0, 3.0])
        assert (p - p).is_zero
        assert (p - Polynomial([0, 0, 3.0])).degree == 1

    def test_complex_coefficients_rejected(self):
        with pytest.raises(ValueError):
            Polynomial([1.0, 1j])


class TestPolyRoots:
    def test_linear(self):
        assert np.allclose(poly_roots(Polynomial([-3.0, 1.0])), [3.0])

    def test_conjugate_pair(self):
        r = np.sort_complex(poly_roots(Polynomial([1.0, 0.0, 1.0])))
        assert np.allclose(r, [-1j, 1j])

    @pytest.mark.parametrize("p", [Polynomial([2.0]), Polynomial([0.0])])
    def test_degree_zero_raises(self, p):
        with pytest.raises(DegreeError):
            poly_roots(p)

    def test_random_degree5_against_companion_oracle(self, rng):
        c = rng.normal(size=6)
        p = Polynomial(c)
        r = poly_roots(p)
        assert len(r) == 5
        assert np.all(np.abs(p(r)) / (1 + np.abs(c).max()) <= 1e-8)
        oracle = np.roots(c[::-1])
        assert np.allclose(np.sort_complex(r), np.sort_complex(oracle), atol=1e-8)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=9))
    def test_residual_and_conjugate_closure(self, coeffs):
        c = np.array(coeffs)
        if abs(c[-1]) < 1e-3:
            c[-1] = 1.0
        p = Polynomial(c)
        r = poly_roots(p)
        assert len(r) == p.degree
        assert np.all(np.abs(p(r)) / (1 + np.abs(c).max()) <= 1e-8 * max(1.0, np.abs(r).max() ** p.degree))
        for z in r[np.abs(r.imag) > 1e-9]:
            assert np.min(np.abs(r - np.conj(z))) <= 1e-9 * (1 + abs(z))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 10_000))
    def test_round_trip_from_roots(self, deg, seed):
        g = np.random.default_rng(seed)
        # well separated roots: jittered points on two circles
        base = np.arange(deg) * 1.3 - 0.65 * deg + g.uniform(-0.2, 0.2, deg)
        p = Polynomial.from_roots(base, lead=2.5)
        q = Polynomial.from_roots(poly_roots(p), lead=p.lead)
        assert rel(q.coeffs, p.coeffs) <= 1e-6


class TestRationalFunction:
    def test_den_is_monic_and_scale_in_numerator(self):
        f = RationalFunction([2.0], [4.0, 2.0])
        assert f.den.lead == 1.0
        assert np.isclose(f(1.0), 2.0 / 6.0)

    def test_common_factor_cancelled(self):
        f = RationalFunction(Polynomial.from_roots([-1.0, 2.0]), Polynomial.from_roots([2.0, -3.0]))
        assert f.num.degree == 1 and len(f.poles) == 1
        assert np.isclose(f(0.5), 1.5 / 3.5)

    def test_pole_evaluation(self):
        with pytest.raises(PoleEvaluation):
            RationalFunction([1.0], [1.0, 1.0])(-1.0)

    def test_reciprocal_of_zero(self):
        with pytest.raises(SingularMatrix):
            RationalFunction.constant(0.0).reciprocal()

    def test_cancel_root_reports_residual(self):
        f = RationalFunction.from_poles(Polynomial.from_roots([3.0]), [3.0, -1.0], cancel=False)
        g, res = f.cancel_root(3.0, 1e-6)
        assert res < 1e-12 and len(g.poles) == 1
        h = RationalFunction.from_poles([1.0], [3.0, -1.0], cancel=False)
        with pytest.raises(ValueError):
            h.cancel_root(3.0, 1e-6)

    def test_properness_and_stability(self):
        f = RationalFunction([1.0, 0.0, 1.0], [1.0, 1.0])
        assert not f.is_proper and f.at_infinity() == np.inf
        g = RationalFunction([1.0], [-1.0, 1.0])
        assert g.is_proper and not g.is_stable()


class TestRationalMatrix:
    def test_identity_evaluates_to_identity(self):
        assert np.allclose(rm_eval(RationalMatrix.identity(3), 2 + 1j), np.eye(3))

    def test_simple_entry(self):
        R = RationalMatrix([[RationalFunction([1.0], [1.0, 1.0])]])
        assert np.allclose(rm_eval(R, 1.0), [[0.5]])

    def test_eval_is_multiplicative(self, rng):
        A, B = random_rm(rng, 2), random_rm(rng, 2)
        for s in SAMPLES:
            assert rel(rm_eval(A @ B, s), rm_eval(A, s) @ rm_eval(B, s)) <= 1e-8

    def test_addition_and_scalar(self, rng):
        A, B = random_rm(rng, 2), random_rm(rng, 2)
        for s in SAMPLES[:4]:
            assert rel((A + B)(s), A(s) + B(s)) <= 1e-8
            assert rel(rm_arith("scalar_mul", 2.5, A)(s), 2.5 * A(s)) <= 1e-8

    def test_associativity(self, rng):
        A, B, C = random_rm(rng, 2), random_rm(rng, 2), random_rm(rng, 2)
        for s in SAMPLES:
            assert rel(((A @ B) @ C)(s), (A @ (B @ C))(s)) <= 1e-8

    def test_inverse(self, rng):
        assert np.allclose(RationalMatrix.identity(2).inv()(0.7), np.eye(2))
        R = RationalMatrix.identity(2) * 3.0 + random_rm(rng, 2) * 0.2
        Ri = R.inv()
        for s in SAMPLES:
            assert rel(Ri(s) @ R(s), np.eye(2)) <= 1e-8
            assert rel(Ri(s), np.linalg.inv(R(s))) <= 1e-8

    def test_singular_inverse(self):
        R = RationalMatrix.constant([[1.0, 2.0], [2.0, 4.0]])
        with pytest.raises(SingularMatrix):
            R.inv()

    def test_shape_errors(self):
        with pytest.raises(ShapeError):
            rm_det_adj(RationalMatrix.constant(np.ones((2, 3))))
        with pytest.raises(ShapeError):
            RationalMatrix.identity(2) @ RationalMatrix.identity(3)


class TestDetAdj:
    def test_one_by_one(self):
        r = RationalFunction([1.0, 2.0], [3.0, 1.0])
        det, adj = rm_det_adj(RationalMatrix([[r]]))
        assert np.isclose(det(0.4), r(0.4))
        assert np.allclose(adj(0.4), [[1.0]])

    def test_two_by_two_cofactors(self, rng):
        R = random_rm(rng, 2)
        det, adj = rm_det_adj(R)
        for s in SAMPLES[:3]:
            (a, b), (c, d) = R(s)
            assert np.isclose(det(s), a * d - b * c)
            assert np.allclose(adj(s), [[d, -b], [-c, a]])

    def test_four_by_four_against_pointwise_oracle(self, rng):
        R = random_rm(rng, 4)
        det, adj = rm_det_adj(R)
        for s in SAMPLES:
            Rs = R(s)
            scale = max(1.0, abs(np.linalg.det(Rs)))
            assert np.linalg.norm(Rs @ adj(s) - det(s) * np.eye(4)) / scale <= 1e-8
            assert abs(det(s) - np.linalg.det(Rs)) / scale <= 1e-8
