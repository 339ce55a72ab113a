"""Compensator reconstruction and closed-loop verification over the family.

With ``Delta0 = I`` the interpolant fixes ``Delta1`` (``F1`` in direct
mode, ``F1 @ F1`` in square-root mode) and the compensator factors follow
from ``[Nc Dc] = [Delta0 Delta1] M^{-1}``.  Closed-loop stability of the
plant ``P_lam`` is equivalent to ``det(lam Delta1 + (1 - lam) Delta0)``
having no zeros in the closed right half plane.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .cee import Interpolant, eval_F
from .errors import (DegenerateFamily, InterpolationMismatch, NotAUnit, RangeError,
                     ShapeError)
from .ratmat import Polynomial, RationalFunction, RationalMatrix, poly_roots
from .stabdata import PencilM, PlantPair, mobius

STABILITY_TOL = 1e-6
CANCEL_RESIDUAL_TOL = 1e-6


def _poly_matrix_in_s(coeffs, p, q):
    """``sum_k C_k (p + q s)^k (p - q s)^(n-k)`` for ``coeffs`` of shape (n+1, l, l)."""
    n = coeffs.shape[0] - 1
    ell = coeffs.shape[1]
    plus = Polynomial([p, q])
    minus = Polynomial([p, -q])
    basis = []
    for k in range(n + 1):
        b = Polynomial([1.0])
        for _ in range(k):
            b = b * plus
        for _ in range(n - k):
            b = b * minus
        basis.append(b)
    rows = []
    for i in range(ell):
        row = []
        for j in range(ell):
            acc = Polynomial([0.0])
            for k in range(n + 1):
                if coeffs[k, i, j] != 0:
                    acc = acc + basis[k] * coeffs[k, i, j]
            row.append(RationalFunction.from_poles(acc, []))
        rows.append(row)
    return RationalMatrix(rows)


def f_plane(itp: Interpolant) -> RationalMatrix:
    """The interpolant as a rational matrix in ``s``: ``F1(s) = F((1-s)/(1+s))``.

    Composing the normalizing automorphism with the Moebius map turns
    ``w = 1/zeta`` into ``(p + q s)/(p - q s)`` with ``p = 1 - a``,
    ``q = 1 + a``; clearing ``(p - q s)^n`` leaves the polynomial fraction
    ``A~(s)^{-1} B~(s) / 2``.
    """
    sol = itp.solution
    cs = sol.structure
    rec = itp.normalization
    ell = cs.ell
    if cs.size == 0:
        Ft = RationalMatrix.constant(0.5 * np.eye(ell))
    else:
        a = rec.a if rec is not None else 0.0
        p, q = 1.0 - a, 1.0 + a
        At = _poly_matrix_in_s(cs.poly_coeffs(sol.A), p, q)
        Bt = _poly_matrix_in_s(cs.poly_coeffs(sol.B), p, q)
        Ft = (At.inv() @ Bt) * 0.5
    if rec is None:
        return Ft
    T = RationalMatrix.constant(rec.T)
    return (T @ Ft @ T.T) * 2.0 + RationalMatrix.constant(rec.S)


@dataclass(frozen=True)
class DeltaPair:
    Delta0: RationalMatrix
    Delta1: RationalMatrix
    mode: str

    @property
    def m(self):
        return self.Delta0.shape[0]

    def at(self, lam):
        return self.Delta1 * lam + self.Delta0 * (1.0 - lam)


def _unit_check(name, X: RationalMatrix, tol=1e-9):
    if not X.is_proper():
        raise NotAUnit(f"{name} is not proper")
    if not X.is_stable(margin=0.0):
        raise NotAUnit(f"{name} has an unstable pole")
    d = X.det()
    if d.is_zero:
        raise NotAUnit(f"det {name} vanishes identically")
    if d.num.degree >= 1:
        z = poly_roots(d.num)
        if np.any(z.real >= -tol):
            raise NotAUnit(f"det {name} has zeros in the closed right half plane: {z[z.real >= -tol]}")
    if d.at_infinity() == 0:
        raise NotAUnit(f"det {name} vanishes at infinity")


def delta_pair(F1: RationalMatrix, mode: str) -> DeltaPair:
    """``Delta0 = I`` and ``Delta1 = F1`` (direct) or ``F1^2`` (sqrt), checked to be units."""
    if mode not in ("direct", "sqrt"):
        raise ValueError(f"unknown mode {mode!r}")
    m = F1.shape[0]
    D1 = F1 if mode == "direct" else F1 @ F1
    _unit_check("Delta1", D1)
    return DeltaPair(RationalMatrix.identity(m), D1, mode)


@dataclass(frozen=True)
class CompensatorFactors:
    """``K = Dc^{-1} Nc``."""

    Nc: RationalMatrix
    Dc: RationalMatrix
    cancel_residual: float = 0.0
    coprime_margin: float = field(default=np.inf)

    def K(self, s):
        return np.linalg.solve(self.Dc(s), self.Nc(s))


def _inverse_blocks(pm: PencilM):
    inv_det = pm.det.reciprocal()
    Minv = pm.adj.map(lambda e: e * inv_det)
    m = pm.m
    return Minv[:m, :m], Minv[:m, m:], Minv[m:, :m], Minv[m:, m:]


def compensator(pm: PencilM, dp: DeltaPair, zeros=None, tol=CANCEL_RESIDUAL_TOL) -> CompensatorFactors:
    """Stable factors ``[Nc Dc] = [Delta0 Delta1] Adj(M) / det(M)``.

    The unstable zeros of ``det M`` are removed from every entry by
    deflation; the numerator must nearly vanish there (relative residual
    below ``tol``), otherwise the Delta-pair does not meet the
    interpolation conditions and :class:`InterpolationMismatch` is raised.
    """
    if dp.m != pm.m:
        raise ShapeError("Delta-pair and pencil sizes differ")
    m11, m12, m21, m22 = _inverse_blocks(pm)
    Nc = dp.Delta0 @ m11 + dp.Delta1 @ m21
    Dc = dp.Delta0 @ m12 + dp.Delta1 @ m22
    if zeros is None:
        from .stabdata import unstable_zeros
        zeros = unstable_zeros(pm)
    targets = [z.s for z in zeros if z.conjugate_tag != "pair_follow"]
    worst = 0.0

    def clean(e):
        nonlocal worst
        for r in targets:
            if e.is_zero:
                break
            if e.poles.size and np.min(np.abs(e.poles - r)) <= 1e-6 * (1 + abs(r)):
                try:
                    e, res = e.cancel_root(r, tol)
                except ValueError as exc:
                    raise InterpolationMismatch(str(exc)) from None
                worst = max(worst, res)
        return e

    Nc = Nc.map(clean)
    Dc = Dc.map(clean)
    for name, X in (("Nc", Nc), ("Dc", Dc)):
        if not X.is_stable():
            raise InterpolationMismatch(f"{name} keeps a pole in the closed right half plane")
        if not X.is_proper():
            raise InterpolationMismatch(f"{name} is not proper")
    margin = np.inf
    for r in targets:
        stacked = np.hstack([Nc(r), Dc(r)])
        margin = min(margin, np.linalg.svd(stacked, compute_uv=False)[-1])
    return CompensatorFactors(Nc, Dc, cancel_residual=worst, coprime_margin=float(margin))


def compensator_block_form(pm: PencilM, dp: DeltaPair, s):
    """Pointwise ``K(s) = (m12 + R m22)^{-1} (m11 + R m21)``, ``R = Delta0^{-1} Delta1``.

    Independent of the rational factors: uses a numeric inverse of ``M(s)``.
    """
    m = pm.m
    Mi = np.linalg.inv(pm.M(s))
    R = np.linalg.solve(dp.Delta0(s), dp.Delta1(s))
    return np.linalg.solve(Mi[:m, m:] + R @ Mi[m:, m:], Mi[:m, :m] + R @ Mi[m:, :m])


class Family(NamedTuple):
    N: RationalMatrix
    D: RationalMatrix
    Delta: RationalMatrix


def _check_lambda(lam):
    if not 0.0 <= lam <= 1.0:
        raise RangeError(f"lambda={lam} outside [0, 1]")


def lambda_family(pp: PlantPair, dp: DeltaPair, lam: float) -> Family:
    _check_lambda(lam)
    return Family(pp.N1 * lam + pp.N0 * (1.0 - lam),
                  pp.D1 * lam + pp.D0 * (1.0 - lam),
                  dp.at(lam))


def _det_zeros(X: RationalMatrix, what):
    d = X.det()
    if d.is_zero:
        raise DegenerateFamily(f"det {what} vanishes identically")
    if d.num.degree < 1:
        return np.zeros(0, dtype=complex)
    return poly_roots(d.num)


def closed_loop_poles(dp: DeltaPair, lam: float):
    """Zeros of ``det(lam Delta1 + (1 - lam) Delta0)``."""
    _check_lambda(lam)
    return _det_zeros(dp.at(lam), "Delta_lambda")


def open_loop_poles(pp: PlantPair, lam: float):
    """Zeros of ``det D_lambda`` (poles of the uncompensated plant)."""
    _check_lambda(lam)
    return _det_zeros(pp.D1 * lam + pp.D0 * (1.0 - lam), "D_lambda")


def disc_view(s):
    """Pole visualization map ``z = (1 + s)/(1 - s)``: stable poles land inside |z| < 1."""
    s = np.asarray(s, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (1.0 + s) / (1.0 - s)


@dataclass(frozen=True)
class LambdaResult:
    lam: float
    poles: np.ndarray
    mapped: np.ndarray
    max_re: float
    stable: bool
    marginal: bool
    open_loop: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))


@dataclass(frozen=True)
class SweepReport:
    results: tuple
    stability_tol: float = STABILITY_TOL

    @property
    def grid(self):
        return [r.lam for r in self.results]

    @property
    def stable(self):
        return all(r.stable for r in self.results)

    @property
    def max_re(self):
        return max((r.max_re for r in self.results), default=-np.inf)


def make_grid(start=0.0, step=0.1, stop=1.0):
    count = int(round((stop - start) / step)) + 1
    grid = np.round(start + step * np.arange(count), 12)
    return [float(x) for x in grid if -1e-12 <= x <= 1 + 1e-12]


def sweep(pp: PlantPair, dp: DeltaPair, grid=None, stability_tol=STABILITY_TOL) -> SweepReport:
    """Closed-loop (and open-loop) poles over the lambda grid."""
    grid = make_grid() if grid is None else list(grid)
    out = []
    for lam in grid:
        poles = closed_loop_poles(dp, lam)
        max_re = float(poles.real.max()) if poles.size else -np.inf
        out.append(LambdaResult(
            lam=float(lam), poles=poles, mapped=disc_view(poles), max_re=max_re,
            stable=max_re < -stability_tol,
            marginal=-stability_tol <= max_re <= stability_tol,
            open_loop=open_loop_poles(pp, lam)))
    return SweepReport(tuple(out), stability_tol)


@dataclass(frozen=True)
class AxisReport:
    min_distance: float
    where: complex
    max_modulus: float
    samples: int
    omega: float


def _axis_distance(mu):
    return np.where(mu.real <= 0, np.abs(mu.imag), np.abs(mu))


def eigen_axis_check(dp: DeltaPair, omega=100.0, density=40, boundary_points=400) -> AxisReport:
    """Sample the eigenvalues of ``Delta0(s)^{-1} Delta1(s)`` over the closed
    right half plane (imaginary segment, right semicircle of radius
    ``omega``, interior grid) and report their closest approach to the
    nonpositive real axis."""
    ys = np.linspace(-omega, omega, boundary_points)
    th = np.linspace(-np.pi / 2, np.pi / 2, boundary_points // 2)
    xs = np.linspace(omega / density, omega, density)
    gy = np.linspace(-omega, omega, density)
    pts = np.concatenate([1j * ys, omega * np.exp(1j * th),
                          (xs[:, None] + 1j * gy[None, :]).ravel()])
    best, where, biggest = np.inf, 0j, 0.0
    for s in pts:
        R = np.linalg.solve(dp.Delta0(s), dp.Delta1(s))
        mu = np.linalg.eigvals(R)
        d = _axis_distance(mu)
        k = int(np.argmin(d))
        if d[k] < best:
            best, where = float(d[k]), complex(s)
        biggest = max(biggest, float(np.abs(mu).max()))
    return AxisReport(best, where, biggest, len(pts), float(omega))


def default_samples(count=8, seed=0):
    """Deterministic right-half-plane sample points."""
    rng = np.random.default_rng(seed)
    return rng.uniform(0.05, 5.0, count) + 1j * rng.uniform(-5.0, 5.0, count)


def verify_bezout(pp: PlantPair, cf: CompensatorFactors, dp: DeltaPair, lam, samples=None):
    """``max_j || Nc N_lam + Dc D_lam - Delta_lam ||_F`` over the samples."""
    _check_lambda(lam)
    samples = default_samples() if samples is None else samples
    worst = 0.0
    for s in samples:
        Nl = lam * pp.N1(s) + (1 - lam) * pp.N0(s)
        Dl = lam * pp.D1(s) + (1 - lam) * pp.D0(s)
        Dlt = lam * dp.Delta1(s) + (1 - lam) * dp.Delta0(s)
        worst = max(worst, np.linalg.norm(cf.Nc(s) @ Nl + cf.Dc(s) @ Dl - Dlt))
    return float(worst)


def f_plane_check(itp: Interpolant, F1: RationalMatrix, samples=None):
    """Largest pointwise gap between ``F1(s)`` and ``F(mobius(s))``."""
    samples = default_samples(16, seed=1) if samples is None else samples
    return max(np.linalg.norm(F1(s) - eval_F(itp, mobius(s))) for s in samples)
