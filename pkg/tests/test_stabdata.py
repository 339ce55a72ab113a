import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from simustab.errors import (BoundaryZero, BranchCutError, NonSimpleZero, NoRealBase,
                             NotCaratheodoryData, RankAssumptionViolated, ShapeError,
                             UnassignableDirection)
from simustab.fixtures import example1_plants, example2_plants, trivial_plants
from simustab.ratmat import RationalFunction, RationalMatrix, rm_det_adj
from simustab.stabdata import (DiscData, InterpolationNode, NullDirection, PencilM, PlantPair,
                               UnstableZero, build_pencil, denormalize_data, hermitian_part,
                               interp_value, mobius, normalize_data, null_direction,
                               prepare_data, principal_sqrt, to_disc, unstable_zeros)


def diag_pencil(*entries):
    """A 4x4 pencil with the given diagonal (for direct null-space tests)."""
    M = RationalMatrix([[entries[i] if i == j else 0.0 for j in range(4)] for i in range(4)])
    det, adj = rm_det_adj(M)
    return PencilM(M=M, m=2, det=det, adj=adj)


def blaschke(root):
    """``(s - root)/(s + 1)``: a stable proper entry with a zero at ``root``."""
    return RationalFunction([-root, 1.0], [1.0, 1.0])


def random_rhp(rng, k):
    return rng.uniform(0.01, 10, k) + 1j * rng.uniform(-10, 10, k)


class TestPlantPair:
    def test_rejects_unstable_entry(self):
        bad = RationalMatrix([[RationalFunction([1.0], [-1.0, 1.0]), 0.0], [0.0, 1.0]])
        eye = RationalMatrix.identity(2)
        with pytest.raises(ValueError):
            PlantPair(eye, bad, eye, eye)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ShapeError):
            PlantPair(RationalMatrix.identity(2), RationalMatrix.identity(3),
                      RationalMatrix.identity(2), RationalMatrix.identity(2))


class TestPencil:
    def test_trivial_pencil_has_no_zeros(self):
        pm = build_pencil(trivial_plants())
        assert pm.M.shape == (4, 4)
        assert pm.det.num.degree == 0 and pm.det(0.3) != 0
        assert unstable_zeros(pm) == []

    def test_block_layout(self):
        pp = example2_plants()
        pm = build_pencil(pp)
        s = 0.7 + 0.2j
        expected = np.block([[pp.N0(s), pp.N1(s)], [pp.D0(s), pp.D1(s)]])
        assert np.allclose(pm.M(s), expected)

    def test_example2_three_unstable_zeros(self):
        zs = unstable_zeros(build_pencil(example2_plants()))
        assert [z.conjugate_tag for z in zs] == ["real", "pair_lead", "pair_follow"]
        assert abs(zs[0].s - 0.2322) < 1e-3
        assert abs(zs[1].s - (0.9862 + 3.5291j)) < 1e-3
        assert zs[2].s == np.conj(zs[1].s)

    def test_example1_literal_data_diagnosis(self):
        """The literal first-example data is singular at infinity; the
        determinant numerator has degree 3 and a single unstable zero."""
        pp = example1_plants()
        from simustab.errors import ImproperPencil
        with pytest.raises(ImproperPencil):
            build_pencil(pp)
        M = RationalMatrix.block([[pp.N0, pp.N1], [pp.D0, pp.D1]])
        assert np.linalg.matrix_rank(M.at_infinity()) == 3
        det, _ = rm_det_adj(M)
        roots = det.num.roots()
        assert det.num.degree == 3
        unstable = roots[roots.real > 0]
        assert len(unstable) == 1 and abs(unstable[0] - 5.149) < 1e-2

    def test_repeated_zero(self):
        f = blaschke(1.0)
        with pytest.raises(NonSimpleZero):
            unstable_zeros(diag_pencil(f * f, 1.0, 1.0, 1.0))

    def test_boundary_zero(self):
        with pytest.raises(BoundaryZero):
            unstable_zeros(diag_pencil(blaschke(0.0), 1.0, 1.0, 1.0))


class TestNullDirection:
    def test_diagonal_pencil(self):
        pm = diag_pencil(blaschke(1.0), 1.0, 1.0, 1.0)
        (z,) = unstable_zeros(pm)
        nd = null_direction(pm, z)
        assert np.allclose(nd.v1, [1, 0]) and np.allclose(nd.v2, [0, 0])

    def test_nullity_two(self):
        pm = diag_pencil(blaschke(1.0), blaschke(1.0), 1.0, 1.0)
        with pytest.raises(RankAssumptionViolated):
            null_direction(pm, UnstableZero(1.0 + 0j, "real"))

    def test_example2_residual_and_conjugate_symmetry(self):
        pm = build_pencil(example2_plants())
        zs = unstable_zeros(pm)
        nds = [null_direction(pm, z) for z in zs]
        for z, nd in zip(zs, nds):
            sv = np.linalg.svd(pm.M(z.s), compute_uv=False)
            assert np.linalg.norm(pm.M(z.s) @ nd.vector) <= 1e-8
            assert sv[-2] > 1e-6
            assert np.isclose(np.linalg.norm(nd.vector), 1.0)
        a, b = nds[1].vector, nds[2].vector
        phase = np.vdot(b, a.conj())
        assert np.isclose(abs(phase), 1.0)
        assert np.allclose(a.conj(), phase * b, atol=1e-10)


class TestInterpValue:
    def test_projector_examples(self):
        nd = NullDirection(np.array([-2.0, 0]), np.array([1.0, 0]))
        assert np.allclose(interp_value(nd, 1.0)[0], np.diag([2, 1]))
        assert np.allclose(interp_value(nd, 3.0)[0], np.diag([2, 3]))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000), st.floats(0.01, 100), st.integers(2, 4))
    def test_tangential_constraint_and_spectrum(self, seed, alpha, m):
        g = np.random.default_rng(seed)
        v1 = g.normal(size=m) + 1j * g.normal(size=m)
        v2 = g.normal(size=m) + 1j * g.normal(size=m)
        Mi, feasible = interp_value(NullDirection(v1, v2), alpha)
        assert np.linalg.norm(Mi @ v2 + v1) <= 1e-12 * max(1.0, np.linalg.norm(v1))
        # alpha on the complement of v2, plus one eigenvalue fixed by the constraint
        mu = -np.vdot(v2, v1) / np.vdot(v2, v2)
        expected = np.sort_complex(np.array([mu] + [alpha] * (m - 1)))
        assert np.allclose(np.sort_complex(np.linalg.eigvals(Mi)), expected, atol=1e-8 * (1 + alpha))
        # hence the eigenvalue feasibility flag does not depend on alpha
        assert feasible == interp_value(NullDirection(v1, v2), 2.0 * alpha + 1.0)[1]

    def test_infeasible_flag_and_strict(self):
        from simustab.errors import AlphaInfeasible
        nd = NullDirection(np.array([2.0, 0]), np.array([1.0, 0]))
        _, ok = interp_value(nd, 1.0)
        assert not ok
        with pytest.raises(AlphaInfeasible):
            interp_value(nd, 1.0, strict=True)

    def test_vanishing_bottom_half(self):
        with pytest.raises(UnassignableDirection):
            interp_value(NullDirection(np.array([1.0, 0]), np.zeros(2)))


class TestPrincipalSqrt:
    def test_simple(self):
        assert np.allclose(principal_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
        assert np.allclose(principal_sqrt(np.eye(3)), np.eye(3))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000), st.integers(1, 5))
    def test_against_scipy(self, seed, n):
        g = np.random.default_rng(seed)
        lam = g.uniform(0.1, 5, n) + 1j * g.uniform(-5, 5, n)
        Q = g.normal(size=(n, n)) + 1j * g.normal(size=(n, n))
        X = Q @ np.diag(lam) @ np.linalg.inv(Q)
        R = principal_sqrt(X)
        assert np.linalg.norm(R @ R - X) <= 1e-10 * np.linalg.norm(X) * np.linalg.cond(Q)
        assert np.all(np.linalg.eigvals(R).real > 0)
        assert np.allclose(R, scipy.linalg.sqrtm(X), atol=1e-8 * np.linalg.cond(Q))

    def test_real_input_gives_real_root(self):
        X = np.array([[2.0, 1.0], [-3.0, 1.0]])
        R = principal_sqrt(X)
        assert not np.iscomplexobj(R) and np.allclose(R @ R, X)

    def test_branch_cut(self):
        with pytest.raises(BranchCutError):
            principal_sqrt(np.diag([-1.0, 1.0]))


class TestDisc:
    def test_mobius_examples(self):
        assert mobius(1.0) == 0
        assert np.isclose(mobius(12.24), -11.24 / 13.24)
        assert abs(mobius(0.9862 + 3.5291j)) < 1

    def test_mobius_maps_rhp_into_disc(self, rng):
        s = random_rhp(rng, 1000)
        assert np.all(np.abs(mobius(s)) < 1)
        w = 1j * rng.uniform(-50, 50, 1000)
        assert np.allclose(np.abs(mobius(w)), 1.0, atol=1e-12)

    def test_to_disc_nodes(self):
        zs = [UnstableZero(12.24 + 0j, "real")]
        dd = to_disc(zs, [np.eye(2)], "direct")
        assert np.isclose(dd.nodes[0].z, -0.848943, atol=1e-6)
        assert dd.n == 0 and dd.ell == 2

    def test_conjugate_symmetry(self):
        s = 1.0 + 2.0j
        W = np.array([[1.0 + 0.3j, 0.2], [0.1j, 2.0]])
        zs = [UnstableZero(s, "pair_lead"), UnstableZero(np.conj(s), "pair_follow")]
        dd = to_disc(zs, [W, W], "direct")
        assert dd.nodes[1].z == np.conj(dd.nodes[0].z)
        assert np.array_equal(dd.nodes[1].W, dd.nodes[0].W.conj())

    def test_not_caratheodory(self):
        with pytest.raises(NotCaratheodoryData):
            to_disc([UnstableZero(2.0 + 0j, "real")], [np.diag([1.0, -1.0])], "direct")


def _random_data(g, ell=2):
    eye = np.eye(ell)
    nodes = [InterpolationNode(0.3 + 0j, (2 * eye + 0.3 * g.normal(size=(ell, ell))).astype(complex))]
    z = 0.2 - 0.5j
    W = 1.5 * eye + 0.3 * (g.normal(size=(ell, ell)) + 1j * g.normal(size=(ell, ell)))
    nodes += [InterpolationNode(z, W), InterpolationNode(np.conj(z), W.conj())]
    return DiscData(ell=ell, nodes=tuple(nodes), mode="direct")


class TestNormalize:
    def test_identity_case(self):
        dd = DiscData(1, (InterpolationNode(0j, np.array([[0.5 + 0j]])),
                          InterpolationNode(0.4 + 0j, np.array([[2.0 + 0j]]))), "direct")
        nd = normalize_data(dd)
        assert nd.normalization.a == 0
        assert np.allclose(nd.normalization.T @ nd.normalization.T.T, [[0.5]])
        assert np.allclose(nd.nodes[1].W, [[2.0]]) and nd.nodes[1].z == 0.4

    def test_scalar_hand_example(self):
        dd = DiscData(1, (InterpolationNode(0.5 + 0j, np.array([[2.0 + 0j]])),), "direct")
        nd = normalize_data(dd, base_index=0)
        assert nd.nodes[0].z == 0 and np.allclose(nd.nodes[0].W, [[0.5]])
        assert np.isclose(nd.normalization.forward_value(np.array([[2.0]]))[0, 0], 0.5)

    def test_round_trip_and_symmetry(self, rng):
        dd = _random_data(rng)
        nd = normalize_data(dd)
        assert nd.nodes[0].z == 0 and np.allclose(nd.nodes[0].W, 0.5 * np.eye(2))
        for node in nd.nodes[1:]:
            assert np.linalg.eigvalsh(hermitian_part(node.W)).min() > 0
        assert np.isclose(nd.nodes[2].z, np.conj(nd.nodes[1].z))
        assert np.allclose(nd.nodes[2].W, nd.nodes[1].W.conj(), atol=1e-12)
        back = denormalize_data(nd)
        for a, b in zip(back.nodes, dd.nodes):
            assert abs(a.z - b.z) <= 1e-12
            assert np.linalg.norm(a.W - b.W) <= 1e-12

    def test_no_real_base(self, rng):
        dd = _random_data(rng)
        dd = DiscData(dd.ell, dd.nodes[1:], dd.mode)
        with pytest.raises(NoRealBase):
            normalize_data(dd)
        nd = prepare_data(dd)
        assert nd.n == 2 and nd.normalization.a == 0
