"""Reduction of a two-plant family to interpolation data in the unit disc.

The pipeline is::

    PlantPair --build_pencil--> PencilM --unstable_zeros--> [UnstableZero]
        --null_direction/interp_value/principal_sqrt--> values
        --to_disc--> DiscData --normalize_data--> DiscData (z0 = 0, W0 = I/2)
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (AlphaInfeasible, BoundaryZero, BranchCutError, DegeneratePencil,
                     ImproperPencil, NonSimpleZero, NoRealBase, NotCaratheodoryData,
                     RankAssumptionViolated, ShapeError, UnassignableDirection)
from .ratmat import RationalMatrix, poly_roots, rm_det_adj

SIMPLICITY_TOL = 1e-6
RANK_GAP_TOL = 1e-6
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class PlantPair:
    """Right factorizations ``P_i = N_i D_i^{-1}`` of the two end plants."""

    N0: RationalMatrix
    D0: RationalMatrix
    N1: RationalMatrix
    D1: RationalMatrix

    def __post_init__(self):
        shapes = {b.shape for b in (self.N0, self.D0, self.N1, self.D1)}
        if len(shapes) != 1:
            raise ShapeError(f"plant blocks have mismatched shapes {sorted(shapes)}")
        (m, k), = shapes
        if m != k:
            raise ShapeError(f"plant blocks must be square, got {m}x{k}")
        for name in ("N0", "D0", "N1", "D1"):
            blk = getattr(self, name)
            if not blk.is_proper():
                raise ValueError(f"{name} has an improper entry")
            if not blk.is_stable():
                raise ValueError(f"{name} has an entry with a pole in the closed right half plane")

    @property
    def m(self):
        return self.N0.shape[0]


@dataclass(frozen=True)
class PencilM:
    M: RationalMatrix
    m: int
    det: object = field(repr=False)
    adj: RationalMatrix = field(repr=False)


@dataclass(frozen=True)
class UnstableZero:
    s: complex
    conjugate_tag: str  # "real" | "pair_lead" | "pair_follow"


@dataclass(frozen=True)
class NullDirection:
    v1: np.ndarray
    v2: np.ndarray

    @property
    def vector(self):
        return np.concatenate([self.v1, self.v2])


@dataclass(frozen=True)
class InterpolationNode:
    z: complex
    W: np.ndarray
    multiplicity: int = 1


@dataclass(frozen=True)
class NormalizationRecord:
    """Disc automorphism and congruence that moved the base node to
    ``(0, I/2)``.  ``T @ T.T`` is the Hermitian part of the base value and
    ``S`` its skew part."""

    a: float
    T: np.ndarray
    S: np.ndarray

    def forward_point(self, z):
        return (z - self.a) / (1.0 - self.a * z)

    def backward_point(self, zeta):
        return (zeta + self.a) / (1.0 + self.a * zeta)

    def forward_value(self, W):
        Ti = np.linalg.inv(self.T)
        return 0.5 * Ti @ (W - self.S) @ Ti.T

    def backward_value(self, Wt):
        return 2.0 * self.T @ Wt @ self.T.T + self.S


@dataclass(frozen=True)
class DiscData:
    ell: int
    nodes: tuple
    mode: str  # "direct" | "sqrt"
    normalization: Optional[NormalizationRecord] = None

    @property
    def n(self):
        return len(self.nodes) - 1

    @property
    def points(self):
        return np.array([nd.z for nd in self.nodes], dtype=complex)


def _is_real(x, tol=1e-9):
    return abs(np.imag(x)) <= tol * (1.0 + abs(x))


def hermitian_part(W):
    return 0.5 * (W + W.conj().T)


def build_pencil(pp: PlantPair) -> PencilM:
    """Block pencil ``M = [[N0, N1], [D0, D1]]`` with its determinant and adjugate."""
    M = RationalMatrix.block([[pp.N0, pp.N1], [pp.D0, pp.D1]])
    det, adj = rm_det_adj(M)
    if det.is_zero:
        raise DegeneratePencil("det M(s) vanishes identically")
    Minf = M.at_infinity()
    sv = np.linalg.svd(Minf, compute_uv=False)
    if sv[-1] <= 1e-10 * max(sv[0], 1.0) or det.relative_degree > 0:
        raise ImproperPencil(
            f"det M(inf) = 0 (smallest singular value of M(inf) is {sv[-1]:.3g})")
    return PencilM(M=M, m=pp.m, det=det, adj=adj)


def pencil_zeros(pm_or_det):
    """All finite zeros of ``det M``."""
    det = pm_or_det.det if isinstance(pm_or_det, PencilM) else pm_or_det
    if det.num.degree < 1:
        return np.zeros(0, dtype=complex)
    return poly_roots(det.num)


def unstable_zeros(pm: PencilM, simplicity_tol=SIMPLICITY_TOL):
    """Zeros of ``det M`` in the open right half plane, each checked simple.

    Conjugate pairs come out adjacent, the member with positive imaginary
    part first (``pair_lead``).
    """
    roots = pencil_zeros(pm)
    num = pm.det.num
    dnum = num.deriv()
    out = []
    for r in roots:
        if abs(r.real) <= BOUNDARY_TOL * (1.0 + abs(r)):
            raise BoundaryZero(f"det M has a zero on the imaginary axis at {r:.6g}")
        if r.real < 0:
            continue
        others = roots[np.abs(roots - r) > 0]
        if len(others) < len(roots) - 1 or (len(others) and np.min(np.abs(others - r)) <= simplicity_tol):
            raise NonSimpleZero(f"unstable zero {r:.6g} is repeated")
        dscale = dnum.eval_scale(r)
        if dscale == 0 or abs(dnum(r)) / dscale <= 1e-8:
            raise NonSimpleZero(f"det M has vanishing derivative at {r:.6g}")
        out.append(complex(r))
    real = sorted(z.real for z in out if _is_real(z))
    upper = sorted((z for z in out if not _is_real(z) and z.imag > 0), key=lambda z: (z.real, z.imag))
    zs = [UnstableZero(complex(x, 0.0), "real") for x in sorted(real, reverse=True)]
    for z in upper:
        zs.append(UnstableZero(z, "pair_lead"))
        zs.append(UnstableZero(z.conjugate(), "pair_follow"))
    return zs


def null_direction(pm: PencilM, z: UnstableZero, rank_gap_tol=RANK_GAP_TOL) -> NullDirection:
    """Unit right null vector of ``M(s_i)``, phase-fixed so its largest
    component is real and positive (so conjugate zeros give conjugate
    directions)."""
    Ms = pm.M(z.s)
    _, sv, vh = np.linalg.svd(Ms)
    if sv[-2] <= rank_gap_tol * max(sv[0], 1.0):
        raise RankAssumptionViolated(
            f"M({z.s:.6g}) has nullity >= 2 (singular values {sv[-2]:.3g}, {sv[-1]:.3g})")
    v = vh[-1].conj()
    k = int(np.argmax(np.abs(v)))
    v = v * (abs(v[k]) / v[k])
    v = v / np.linalg.norm(v)
    resid = np.linalg.norm(Ms @ v)
    if resid > 1e-8 * max(sv[0], 1.0):
        raise RankAssumptionViolated(f"null direction residual {resid:.3g} at {z.s:.6g}")
    m = pm.m
    return NullDirection(v1=v[:m], v2=v[m:])


def on_nonpositive_axis(mu, tol=1e-12):
    mu = np.atleast_1d(mu)
    return (mu.real <= tol * (1 + np.abs(mu))) & (np.abs(mu.imag) <= tol * (1 + np.abs(mu)))


def interp_value(nd: NullDirection, alpha: float = 1.0, strict: bool = False):
    """Ratio ``Delta0(s_i)^{-1} Delta1(s_i)`` completed from the tangential
    condition ``M_i v2 = -v1``.

    The minimal-norm part ``-v1 v2^*/|v2|^2`` fixes the action on ``v2``;
    ``alpha`` times the projector onto its orthogonal complement fills in
    the rest.  Returns ``(M_i, feasible)`` where ``feasible`` says no
    eigenvalue sits on the closed nonpositive real axis; with
    ``strict=True`` an infeasible value raises :class:`AlphaInfeasible`.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    v1 = np.asarray(nd.v1, dtype=complex)
    v2 = np.asarray(nd.v2, dtype=complex)
    nv2 = np.vdot(v2, v2).real
    if np.sqrt(nv2) <= 1e-10:
        raise UnassignableDirection("bottom half of the null direction vanishes")
    proj = np.outer(v2, v2.conj()) / nv2
    Mi = -np.outer(v1, v2.conj()) / nv2 + alpha * (np.eye(len(v2)) - proj)
    feasible = not np.any(on_nonpositive_axis(np.linalg.eigvals(Mi), tol=1e-10))
    if strict and not feasible:
        raise AlphaInfeasible(f"alpha={alpha:g} puts an eigenvalue on the nonpositive real axis")
    return Mi, feasible


def principal_sqrt(X):
    """Principal matrix square root via the complex Schur form.

    Uses the upper-triangular recurrence on ``T = Q^* X Q``:
    ``R_ij = (T_ij - sum_k R_ik R_kj) / (R_ii + R_jj)``.
    """
    from scipy.linalg import schur

    X = np.asarray(X)
    real_input = not np.iscomplexobj(X) or np.allclose(X.imag, 0.0, atol=0.0)
    T, Q = schur(X.astype(complex), output="complex")
    lam = np.diag(T)
    if np.any(on_nonpositive_axis(lam, tol=1e-10)):
        raise BranchCutError(f"eigenvalue on the nonpositive real axis: {lam}")
    n = T.shape[0]
    R = np.zeros_like(T)
    R[np.diag_indices(n)] = np.sqrt(lam)
    for j in range(n):
        for i in range(j - 1, -1, -1):
            acc = T[i, j] - R[i, i + 1:j] @ R[i + 1:j, j]
            R[i, j] = acc / (R[i, i] + R[j, j])
    out = Q @ R @ Q.conj().T
    if real_input:
        return out.real
    return out


def mobius(s):
    """Right half plane to unit disc: ``z = (1 - s) / (1 + s)``."""
    return (1.0 - s) / (1.0 + s)


def mobius_inv(z):
    return (1.0 - z) / (1.0 + z)


def to_disc(zeros, values, mode: str, ell=None) -> DiscData:
    """Map zeros to disc nodes and attach their values.

    Values at ``pair_follow`` zeros are replaced by the conjugate of the
    lead's value, which keeps the data exactly conjugate-symmetric.
    """
    if mode not in ("direct", "sqrt"):
        raise ValueError(f"unknown mode {mode!r}")
    if len(zeros) != len(values):
        raise ShapeError("one value per zero is required")
    nodes = []
    lead_val = None
    for uz, W in zip(zeros, values):
        W = np.asarray(W, dtype=complex)
        if uz.conjugate_tag == "pair_lead":
            lead_val = W
        elif uz.conjugate_tag == "pair_follow":
            if lead_val is None:
                raise ValueError("pair_follow zero without its lead")
            W = lead_val.conj()
            lead_val = None
        else:
            W = W.real.astype(complex)
        he = np.linalg.eigvalsh(hermitian_part(W))
        if he.min() <= 0:
            raise NotCaratheodoryData(
                f"value at s={uz.s:.6g} has non-positive Hermitian part (min eig {he.min():.3g})")
        z = mobius(uz.s)
        if uz.conjugate_tag == "real":
            z = complex(z.real, 0.0)
        nodes.append(InterpolationNode(z=z, W=W))
    if ell is None:
        if not nodes:
            raise ValueError("ell is required when there are no nodes")
        ell = nodes[0].W.shape[0]
    return DiscData(ell=ell, nodes=tuple(nodes), mode=mode)


def with_artificial_base(dd: DiscData) -> DiscData:
    """Prepend the node ``(0, I/2)`` (raises ``n`` by one)."""
    base = InterpolationNode(z=0j, W=0.5 * np.eye(dd.ell, dtype=complex))
    return DiscData(ell=dd.ell, nodes=(base,) + tuple(dd.nodes), mode=dd.mode)


def normalize_data(dd: DiscData, base_index=None) -> DiscData:
    """Move the base node to 0 with value ``I/2``; the base node becomes
    the first node of the returned data.

    Without ``base_index`` the real node of smallest modulus is used.
    """
    if base_index is None:
        real = [i for i, nd in enumerate(dd.nodes) if _is_real(nd.z)]
        if not real:
            raise NoRealBase("no real node to normalize on")
        base_index = min(real, key=lambda i: abs(dd.nodes[i].z))
    base = dd.nodes[base_index]
    if not _is_real(base.z) or not np.allclose(base.W.imag, 0.0, atol=1e-12):
        raise ValueError("the base node must be real with a real value")
    Wb = base.W.real
    He = 0.5 * (Wb + Wb.T)
    S = 0.5 * (Wb - Wb.T)
    try:
        T = np.linalg.cholesky(He)
    except np.linalg.LinAlgError:
        raise NotCaratheodoryData("base value has non-positive Hermitian part") from None
    rec = NormalizationRecord(a=float(base.z.real), T=T, S=S)
    order = [base_index] + [i for i in range(len(dd.nodes)) if i != base_index]
    nodes = []
    for i in order:
        nd = dd.nodes[i]
        z = rec.forward_point(nd.z)
        W = rec.forward_value(nd.W)
        if i == base_index:
            z, W = 0j, 0.5 * np.eye(dd.ell, dtype=complex)
        elif np.linalg.eigvalsh(hermitian_part(W)).min() <= 0:
            raise NotCaratheodoryData("normalization lost positivity")
        nodes.append(InterpolationNode(z=complex(z), W=W))
    return DiscData(ell=dd.ell, nodes=tuple(nodes), mode=dd.mode, normalization=rec)


def denormalize_data(dd: DiscData) -> DiscData:
    rec = dd.normalization
    if rec is None:
        return dd
    nodes = tuple(InterpolationNode(z=complex(rec.backward_point(nd.z)), W=rec.backward_value(nd.W))
                  for nd in dd.nodes)
    return DiscData(ell=dd.ell, nodes=nodes, mode=dd.mode)


def prepare_data(dd: DiscData) -> DiscData:
    """Normalize, falling back to an artificial base node when no node is real."""
    try:
        return normalize_data(dd)
    except NoRealBase:
        return normalize_data(with_artificial_base(dd), base_index=0)
