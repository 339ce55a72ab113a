"""Matrix analytic interpolation through the Covariance Extension Equation.

Given normalized disc data (base node ``0 -> I/2`` plus ``n`` further
nodes ``z_k -> W_k``), every Caratheodory interpolant of McMillan degree at
most ``l*n`` is written as::

    F(z) = I/2 + z H (I - z F)^{-1} G,      F = J - A H,

and is selected by the free parameter ``Sigma`` (``n*l x l``).  ``P`` solves

    P = Gamma (P - P H' H P) Gamma' + G(P) G(P)',
    G(P) = u + U[Sigma + Gamma P H'],     Gamma = J - Sigma H,

where the affine data map ``(u, U)`` encodes the interpolation conditions.
The equation is solved by continuation in the data from the trivial
problem (all values ``I/2``, solution ``P = 0``).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (ContinuationFailure, DegenerateNodeSet, InfeasibleData,
                     InternalPositivityError, OutsideDomain, ShapeError, UnstableSigma)
from .stabdata import DiscData, NormalizationRecord

logger = logging.getLogger(__name__)


def shift_matrix(nu):
    return np.eye(nu, k=1)


@dataclass(frozen=True)
class CanonicalStructure:
    """Observer canonical pair ``(H, J)`` with uniform observability indices."""

    ell: int
    n: int
    indices: tuple
    H: np.ndarray
    J: np.ndarray

    @property
    def size(self):
        return self.ell * self.n

    def Pi(self, z):
        """``diag(pi_n(z))`` with ``pi_n(z) = (z^{n-1}, ..., z, 1)``; ``l x nl``."""
        row = np.asarray(z, dtype=complex) ** np.arange(self.n - 1, -1, -1)
        return np.kron(np.eye(self.ell), row[None, :])

    def Dz(self, z):
        return complex(z) ** self.n * np.eye(self.ell)

    def poly_coeffs(self, X):
        """Coefficients (ascending powers) of ``D(z) + Pi(z) X`` as ``(n+1, l, l)``."""
        n, ell = self.n, self.ell
        C = np.zeros((n + 1, ell, ell))
        C[n] = np.eye(ell)
        for i in range(ell):
            for k in range(n):
                C[k, i, :] = X[i * n + (n - 1 - k), :]
        return C


def build_structure(ell: int, n: int) -> CanonicalStructure:
    """``H = diag(h_n)``, ``J = diag(J_n)`` with all indices equal to ``n``.

    ``n = 0`` gives the empty structure (constant interpolant).
    """
    if ell < 1 or n < 0:
        raise ValueError("need ell >= 1 and n >= 0")
    h = np.zeros((1, n))
    if n:
        h[0, 0] = 1.0
    H = np.kron(np.eye(ell), h)
    J = np.kron(np.eye(ell), shift_matrix(n))
    return CanonicalStructure(ell=ell, n=n, indices=(n,) * ell, H=H, J=J)


@dataclass(frozen=True)
class DataOperator:
    """Affine map ``X -> u + U[X]`` with ``U`` stored on row-major ``vec(X)``."""

    u: np.ndarray
    U: np.ndarray
    data: DiscData = field(repr=False)
    structure: CanonicalStructure = field(repr=False)
    tau: float = 1.0

    def apply_U(self, X):
        return (self.U @ X.ravel()).reshape(X.shape)

    def G(self, X):
        return self.u + self.apply_U(X)

    def deformed(self, tau):
        return build_data_operator(self.data, self.structure, tau=tau)


def _realified_rows(dd: DiscData):
    """Nodes whose equations are kept: real nodes once, one member of each
    conjugate pair split into real and imaginary parts."""
    keep = []
    for nd in dd.nodes[1:]:
        z = nd.z
        if abs(z.imag) <= 1e-12 * (1 + abs(z)):
            keep.append((nd, "real"))
        elif z.imag > 0:
            keep.append((nd, "pair"))
    return keep


def _split(blocks, kinds):
    out = []
    for b, kind in zip(blocks, kinds):
        out.append(b.real)
        if kind == "pair":
            out.append(b.imag)
    return np.vstack(out)


def build_data_operator(dd: DiscData, cs: CanonicalStructure, tau: float = 1.0) -> DataOperator:
    """Affine data map from the interpolation identity ``B(w) = 2 A(w) W``.

    With ``w_k = 1/z_k`` and ``C_k = (2W_k - I)(2W_k + I)^{-1}`` the
    conditions read ``Pi(w_k) G = (D(w_k) + Pi(w_k) X) C_k`` for
    ``X = A + G``; stacking over the nodes and inverting the block
    Vandermonde matrix ``V`` gives ``G = u + U[X]``.  ``tau`` scales the
    data towards the trivial values ``I/2``.
    """
    ell, n = cs.ell, cs.n
    N = cs.size
    if dd.n != n or dd.ell != ell:
        raise ShapeError(f"data has (l, n) = ({dd.ell}, {dd.n}), structure ({ell}, {n})")
    if dd.nodes and (abs(dd.nodes[0].z) > 1e-14
                     or not np.allclose(dd.nodes[0].W, 0.5 * np.eye(ell), atol=1e-12)):
        raise ValueError("data must be normalized: base node (0, I/2) first")
    if N == 0:
        return DataOperator(u=np.zeros((0, ell)), U=np.zeros((0, 0)), data=dd, structure=cs, tau=tau)
    keep = _realified_rows(dd)
    kinds = [k for _, k in keep]
    if sum(1 if k == "real" else 2 for k in kinds) != n:
        raise ValueError("interpolation nodes are not conjugate-symmetric")
    eye = np.eye(ell)
    ws, Cs = [], []
    for nd, _ in keep:
        if abs(nd.z) < 1e-14:
            raise DegenerateNodeSet("non-base node coincides with the base node")
        W = eye / 2 + tau * (nd.W - eye / 2)
        M2 = 2 * W + eye
        if np.linalg.svd(M2, compute_uv=False)[-1] <= 1e-14:
            raise InternalPositivityError("2W + I is singular although He W > 0")
        ws.append(1.0 / nd.z)
        Cs.append((2 * W - eye) @ np.linalg.inv(M2))
    V = _split([cs.Pi(w) for w in ws], kinds)
    if np.linalg.cond(V) > 1e12:
        raise DegenerateNodeSet("block Vandermonde matrix is numerically singular")
    Vinv = np.linalg.inv(V)
    u = Vinv @ _split([cs.Dz(w) @ C for w, C in zip(ws, Cs)], kinds)
    U = np.zeros((N * ell, N * ell))
    E = np.zeros((N, ell))
    for col in range(N * ell):
        E.flat[col] = 1.0
        U[:, col] = (Vinv @ _split([cs.Pi(w) @ E @ C for w, C in zip(ws, Cs)], kinds)).ravel()
        E.flat[col] = 0.0
    return DataOperator(u=u, U=U, data=dd, structure=cs, tau=tau)


@dataclass(frozen=True)
class CEEProblem:
    structure: CanonicalStructure
    dataop: DataOperator
    Sigma: np.ndarray

    def __post_init__(self):
        cs = self.structure
        S = np.asarray(self.Sigma, dtype=float)
        if S.shape != (cs.size, cs.ell):
            raise ShapeError(f"Sigma must be {cs.size}x{cs.ell}, got {S.shape}")
        object.__setattr__(self, "Sigma", S)

    @property
    def Gamma(self):
        return self.structure.J - self.Sigma @ self.structure.H


def cee_residual(P, prob: CEEProblem, dataop: Optional[DataOperator] = None):
    """``P - Gamma (P - P H'H P) Gamma' - G(P) G(P)'``."""
    dop = prob.dataop if dataop is None else dataop
    H = prob.structure.H
    Gam = prob.Gamma
    G = dop.G(prob.Sigma + Gam @ P @ H.T)
    return P - Gam @ (P - P @ H.T @ H @ P) @ Gam.T - G @ G.T


@dataclass(frozen=True)
class CEESolution:
    structure: CanonicalStructure
    Sigma: np.ndarray
    P: np.ndarray
    A: np.ndarray
    B: np.ndarray
    G: np.ndarray
    R: np.ndarray
    residual: float = 0.0
    steps: int = 0
    newton_iterations: int = 0

    @property
    def F(self):
        """State matrix ``J - A H`` of the realization."""
        return self.structure.J - self.A @ self.structure.H

    def A_poly(self, z):
        cs = self.structure
        return cs.Dz(z) + cs.Pi(z) @ self.A

    def B_poly(self, z):
        cs = self.structure
        return cs.Dz(z) + cs.Pi(z) @ self.B


def _sym_unpack(x, N, iu):
    P = np.zeros((N, N))
    P[iu] = x
    return P + P.T - np.diag(np.diag(P))


def _newton(fun, x, tol_fn, max_iter, fd_step):
    """Newton with a forward-difference Jacobian; returns ``(x, ok, iters)``."""
    f = fun(x)
    for it in range(max_iter):
        if not np.all(np.isfinite(f)):
            return x, False, it
        if np.linalg.norm(f) <= tol_fn(x):
            return x, True, it
        jac = np.empty((len(f), len(x)))
        for j in range(len(x)):
            h = fd_step * max(1.0, abs(x[j]))
            xp = x.copy()
            xp[j] += h
            jac[:, j] = (fun(xp) - f) / h
        dx = np.linalg.lstsq(jac, -f, rcond=None)[0]
        x_new = x + dx
        f_new = fun(x_new)
        if not np.all(np.isfinite(f_new)) or np.linalg.norm(f_new) > 1e3 * (np.linalg.norm(f) + 1e-300):
            return x, False, it + 1
        x, f = x_new, f_new
    return x, bool(np.linalg.norm(f) <= tol_fn(x)), max_iter


def _fixed_point(step_fn, P, tol_fn, beta=0.5, max_iter=2000):
    for _ in range(max_iter):
        rhs = step_fn(P)
        if not np.all(np.isfinite(rhs)):
            return P, False
        P_new = (1 - beta) * P + beta * rhs
        P_new = 0.5 * (P_new + P_new.T)
        if np.linalg.norm(rhs - P) <= tol_fn(P):
            return P_new, True
        P = P_new
    return P, False


def solve_cee(prob: CEEProblem, *, step0=0.1, min_step=1e-4, tol=1e-12,
              max_newton=50, fd_step=1e-7) -> CEESolution:
    """Solve the CEE by continuation ``tau: 0 -> 1`` in the data.

    Each step predicts with the previous ``P`` and corrects by Newton
    (falling back to a damped fixed-point iteration); the step is halved on
    corrector failure and the solve aborts below ``min_step``.
    """
    cs = prob.structure
    N, ell = cs.size, cs.ell
    H = cs.H
    Sig = prob.Sigma
    Gam = prob.Gamma
    if N == 0:
        z = np.zeros((0, ell))
        return CEESolution(cs, Sig, np.zeros((0, 0)), z, z, z, np.eye(ell))
    rho = np.abs(np.linalg.eigvals(Gam)).max()
    if rho >= 1.0:
        raise UnstableSigma(f"spectral radius of J - Sigma H is {rho:.4g} >= 1")
    iu = np.triu_indices(N)
    P = np.zeros((N, N))
    tau, step = 0.0, step0
    steps = iters = 0
    while tau < 1.0:
        t_next = min(1.0, tau + step)
        dop = prob.dataop.deformed(t_next)

        def resid(x, dop=dop):
            return cee_residual(_sym_unpack(x, N, iu), prob, dop)[iu]

        def tol_fn(x):
            return tol * (1.0 + np.linalg.norm(_sym_unpack(x, N, iu)))

        x, ok, k = _newton(resid, P[iu].copy(), tol_fn, max_newton, fd_step)
        iters += k
        P_try = _sym_unpack(x, N, iu)
        if not ok:
            def rhs(Pm, dop=dop):
                G = dop.G(Sig + Gam @ Pm @ H.T)
                return Gam @ (Pm - Pm @ H.T @ H @ Pm) @ Gam.T + G @ G.T
            P_try, ok = _fixed_point(rhs, P.copy(),
                                     lambda Pm: tol * (1.0 + np.linalg.norm(Pm)))
        if ok and np.linalg.eigvalsh(H @ P_try @ H.T).max() >= 1.0:
            ok = False  # jumped off the branch with H P H' < I
        if ok:
            P = 0.5 * (P_try + P_try.T)
            tau = t_next
            steps += 1
            step = min(step0, 2 * step)
        else:
            step /= 2
            logger.debug("corrector failed at tau=%.6g, step -> %.3g", t_next, step)
            if step < min_step:
                pick_min = np.linalg.eigvalsh(pick_matrix(prob.dataop.data)).min()
                if pick_min < 0:
                    raise InfeasibleData(f"continuation stalled at tau={tau:.6g}; "
                                         f"Pick matrix is indefinite (min eig {pick_min:.3g})")
                raise ContinuationFailure(f"continuation stalled at tau={tau:.6g}")
    if np.linalg.eigvalsh(P).min() < -1e-10 or np.linalg.eigvalsh(H @ P @ H.T).max() >= 1 - 1e-9:
        raise InfeasibleData("CEE solution violates P >= 0, H P H' < I")
    dop = prob.dataop
    X = Sig + Gam @ P @ H.T
    G = dop.G(X)
    A = X - G
    B = X + G
    w, V = np.linalg.eigh(np.eye(ell) - H @ P @ H.T)
    R = (V * np.sqrt(w)) @ V.T
    res = np.linalg.norm(cee_residual(P, prob))
    return CEESolution(cs, Sig, P, A, B, G, R, residual=float(res), steps=steps,
                       newton_iterations=iters)


@dataclass(frozen=True)
class Interpolant:
    """Solved interpolant; ``normalization`` maps back to the original disc data."""

    solution: CEESolution
    normalization: Optional[NormalizationRecord] = None
    mode: str = "direct"

    @property
    def ell(self):
        return self.solution.structure.ell

    def normalized(self, zeta):
        sol = self.solution
        ell = self.ell
        N = sol.structure.size
        if N == 0:
            return 0.5 * np.eye(ell, dtype=complex)
        zeta = complex(zeta)
        x = np.linalg.solve(np.eye(N) - zeta * sol.F, sol.G)
        return 0.5 * np.eye(ell) + zeta * sol.structure.H @ x

    def __call__(self, z):
        return eval_F(self, z)


def eval_F(itp: Interpolant, z, normalized: bool = False):
    """Value of the interpolant at ``|z| < 1``.

    Uses the realization ``I/2 + z H (I - z F)^{-1} G``, which equals
    ``A(1/z)^{-1} B(1/z) / 2`` but stays well conditioned near ``z = 0``.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise OutsideDomain(f"|z| = {abs(z):.6g} is outside the open unit disc")
    rec = itp.normalization
    if normalized or rec is None:
        return itp.normalized(z)
    return rec.backward_value(itp.normalized(rec.forward_point(z)))


def eval_F_fraction(itp: Interpolant, z, normalized: bool = False):
    """Same value through the matrix fraction ``A(w)^{-1} B(w) / 2``, ``w = 1/zeta``."""
    rec = itp.normalization
    zeta = complex(z) if (normalized or rec is None) else rec.forward_point(complex(z))
    sol = itp.solution
    if zeta == 0 or sol.structure.size == 0:
        val = 0.5 * np.eye(itp.ell, dtype=complex)
    else:
        w = 1.0 / zeta
        val = 0.5 * np.linalg.solve(sol.A_poly(w), sol.B_poly(w))
    if normalized or rec is None:
        return val
    return rec.backward_value(val)


@dataclass(frozen=True)
class SolutionReport:
    interp_residual: float
    min_herm_eig: float
    pole_radius: float
    controllability_rank: int
    state_dim: int

    @property
    def ok(self):
        return self.min_herm_eig > 0 and self.pole_radius < 1


def check_solution(itp: Interpolant, dd: DiscData, grid=512, radius=0.99) -> SolutionReport:
    """Interpolation residual, positivity of ``F + F^*`` on a circle, pole radius.

    Compared in normalized coordinates when ``dd`` is normalized, in the
    original ones otherwise.
    """
    normalized = dd.normalization is not None
    res = max((np.linalg.norm(eval_F(itp, nd.z, normalized=normalized) - nd.W)
               for nd in dd.nodes), default=0.0)
    th = 2 * np.pi * np.arange(grid) / grid
    min_eig = np.inf
    for t in th:
        Fz = eval_F(itp, radius * np.exp(1j * t), normalized=normalized)
        min_eig = min(min_eig, np.linalg.eigvalsh(Fz + Fz.conj().T).min())
    sol = itp.solution
    N = sol.structure.size
    if N:
        Fm = sol.F
        radius_poles = float(np.max(np.abs(np.linalg.eigvals(Fm))))
        ctrb = np.hstack([np.linalg.matrix_power(Fm, k) @ sol.G for k in range(N)])
        rank = int(np.linalg.matrix_rank(ctrb, tol=1e-9 * max(1.0, np.abs(ctrb).max())))
    else:
        radius_poles, rank = 0.0, 0
    return SolutionReport(interp_residual=float(res), min_herm_eig=float(min_eig),
                          pole_radius=radius_poles, controllability_rank=rank, state_dim=N)


def solve_interpolation(dd: DiscData, Sigma=None, **kwargs) -> Interpolant:
    """Convenience wrapper: data with base node ``(0, I/2)`` in, interpolant out."""
    cs = build_structure(dd.ell, dd.n)
    if Sigma is None:
        Sigma = np.zeros((cs.size, cs.ell))
    prob = CEEProblem(cs, build_data_operator(dd, cs), Sigma)
    sol = solve_cee(prob, **kwargs)
    return Interpolant(sol, dd.normalization, dd.mode)


def pick_matrix(dd: DiscData):
    """Block Pick matrix ``[(W_i + W_j^*) / (1 - z_i conj(z_j))]``; positive
    definiteness is necessary for a Caratheodory interpolant to exist."""
    blocks = [[(a.W + b.W.conj().T) / (1 - a.z * np.conj(b.z)) for b in dd.nodes] for a in dd.nodes]
    return np.block(blocks)
