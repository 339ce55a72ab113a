"""Floating-point polynomial, rational-function and rational-matrix algebra.

Polynomials carry real coefficients in ascending powers.  A
:class:`RationalFunction` keeps its (monic) denominator as the multiset of
its poles, which makes least common denominators and pole/zero cancellation
cheap and robust: a pole ``p`` is cancelled when the numerator nearly
vanishes there, so numerators never have to be re-rooted.
"""
from __future__ import annotations

import numbers

import numpy as np
from numpy.polynomial import polynomial as npp

from .errors import DegreeError, PoleEvaluation, ShapeError, SingularMatrix

# relative size below which a coefficient produced by cancellation is zero
DROP_TOL = 1e-12
# relative numerator residual at a pole below which the pole is cancelled
CANCEL_TOL = 1e-7
# a cancelled pole must also have a numerator root this close (Newton estimate)
CANCEL_ROOT_DIST = 1e-6
# relative distance under which two poles are the same pole
POLE_MATCH_TOL = 1e-8
# roots whose imaginary part is below this (relative) are snapped to the axis
_REAL_SNAP = 1e-7


class Polynomial:
    """Real polynomial ``c[0] + c[1] s + ... + c[d] s**d``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=(0.0,)):
        c = np.atleast_1d(np.asarray(coeffs))
        if np.iscomplexobj(c):
            scale = np.max(np.abs(c)) if c.size else 0.0
            if np.max(np.abs(c.imag), initial=0.0) > 1e-8 * max(scale, 1e-300):
                raise ValueError("polynomial coefficients must be real")
            c = c.real
        c = np.array(c, dtype=float).ravel()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        self.coeffs = c
        self.coeffs.setflags(write=False)

    @classmethod
    def from_roots(cls, roots, lead=1.0):
        roots = np.asarray(roots, dtype=complex).ravel()
        if roots.size == 0:
            return cls([lead])
        c = np.poly(roots)[::-1]
        scale = np.max(np.abs(c))
        if np.max(np.abs(c.imag)) > 1e-8 * scale:
            raise ValueError("roots are not closed under conjugation")
        return cls(lead * c.real)

    @property
    def degree(self):
        return -1 if self.is_zero else len(self.coeffs) - 1

    @property
    def is_zero(self):
        return len(self.coeffs) == 1 and self.coeffs[0] == 0.0

    @property
    def lead(self):
        return self.coeffs[-1]

    def __call__(self, s):
        s = np.asarray(s)
        out = np.zeros_like(s, dtype=complex if np.iscomplexobj(s) else float)
        for c in self.coeffs[::-1]:
            out = out * s + c
        return out

    def eval_scale(self, s):
        """``sum |c_k| |s|^k``: the magnitude scale of evaluating at ``s``."""
        return float(np.sum(np.abs(self.coeffs) * np.abs(s) ** np.arange(len(self.coeffs))))

    def deriv(self):
        if len(self.coeffs) == 1:
            return Polynomial([0.0])
        return Polynomial(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def roots(self):
        return poly_roots(self)

    def _combine(self, other, sign):
        other = as_polynomial(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n)
        b = np.zeros(n)
        a[: len(self.coeffs)] = self.coeffs
        b[: len(other.coeffs)] = other.coeffs
        out = a + sign * b
        out[np.abs(out) < DROP_TOL * (np.abs(a) + np.abs(b))] = 0.0
        return Polynomial(out)

    def __add__(self, other):
        return self._combine(other, 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __rsub__(self, other):
        return as_polynomial(other)._combine(self, -1.0)

    def __neg__(self):
        return Polynomial(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return Polynomial(self.coeffs * float(other))
        other = as_polynomial(other)
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __divmod__(self, other):
        q, r = npp.polydiv(self.coeffs, as_polynomial(other).coeffs)
        return Polynomial(q), Polynomial(r)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()})"


def as_polynomial(p):
    if isinstance(p, Polynomial):
        return p
    return Polynomial(p)


def _snap_conjugates(r):
    """Make a root list of a real polynomial exactly conjugate-closed."""
    tol = _REAL_SNAP * (1.0 + np.abs(r))
    real = r[np.abs(r.imag) <= tol].real
    upper = list(r[r.imag > tol])
    lower = list(r[r.imag < -tol])
    if len(upper) != len(lower):
        return np.sort_complex(r)
    pairs = []
    for u in upper:
        j = int(np.argmin([abs(u - np.conj(v)) for v in lower]))
        v = lower.pop(j)
        pairs.append(0.5 * (u + np.conj(v)))
    pairs = np.array(pairs, dtype=complex)
    out = np.concatenate([real.astype(complex), pairs, pairs.conj()])
    return np.sort_complex(out)


def poly_roots(p):
    """Roots of a real polynomial.

    Eigenvalues of the companion matrix, each refined by one Newton step
    (kept only if it lowers the residual), then snapped into exact conjugate
    pairs.  Roots at the origin are split off exactly beforehand.
    """
    p = as_polynomial(p)
    if p.degree < 1:
        raise DegreeError("poly_roots needs a polynomial of degree >= 1")
    c = p.coeffs
    nzero = int(np.flatnonzero(c)[0])
    c = c[nzero:]
    d = len(c) - 1
    if d == 0:
        return np.zeros(nzero, dtype=complex)
    comp = np.zeros((d, d))
    comp[1:, :-1] = np.eye(d - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    r = np.linalg.eigvals(comp).astype(complex)
    dp = p.deriv()
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for i, x in enumerate(r):
            fx = p(x)
            dfx = dp(x)
            if dfx != 0:
                y = x - fx / dfx
                fy = p(y)
                if np.isfinite(fy) and abs(fy) < abs(fx):
                    r[i] = y
    return _snap_conjugates(np.concatenate([r, np.zeros(nzero, dtype=complex)]))


def _match(pa, pb, tol=POLE_MATCH_TOL):
    """Greedy multiset matching; returns boolean masks of matched entries."""
    used_a = np.zeros(len(pa), dtype=bool)
    used_b = np.zeros(len(pb), dtype=bool)
    for j, q in enumerate(pb):
        if not len(pa):
            break
        dist = np.where(used_a, np.inf, np.abs(pa - q))
        i = int(np.argmin(dist))
        if dist[i] <= tol * (1.0 + abs(q)):
            used_a[i] = True
            used_b[j] = True
    return used_a, used_b


def _near_root(num, p, tol):
    """``num`` nearly vanishes at ``p``: small relative residual and a
    Newton step to the nearest root below ``CANCEL_ROOT_DIST``.  When the
    step is too long the root may be multiple, so the derivative is tested
    the same way."""
    val = abs(num(p))
    if val > tol * num.eval_scale(p):
        return False
    d = num.deriv()
    if val <= CANCEL_ROOT_DIST * (1.0 + abs(p)) * abs(d(p)):
        return True
    return d.degree >= 1 and _near_root(d, p, tol)


class RationalFunction:
    """``num(s) / prod(s - p for p in poles)`` with real coefficients.

    Construct from a numerator and denominator (coefficient arrays or
    :class:`Polynomial`); the denominator is made monic and factored once.
    """

    __slots__ = ("num", "poles")

    def __init__(self, num, den=1.0, *, cancel=True):
        num = as_polynomial(num)
        den = as_polynomial(den)
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        poles = poly_roots(den) if den.degree >= 1 else np.zeros(0, dtype=complex)
        self.num = num * (1.0 / den.lead)
        self.poles = poles
        if self.num.is_zero:
            self.poles = np.zeros(0, dtype=complex)
        elif cancel:
            self._cancel_inplace(CANCEL_TOL)

    @classmethod
    def from_poles(cls, num, poles, *, cancel=True, tol=CANCEL_TOL):
        rf = cls.__new__(cls)
        rf.num = as_polynomial(num)
        rf.poles = np.asarray(poles, dtype=complex).ravel().copy()
        if rf.num.is_zero:
            rf.poles = np.zeros(0, dtype=complex)
        elif cancel:
            rf._cancel_inplace(tol)
        return rf

    @classmethod
    def constant(cls, c):
        return cls.from_poles([float(c)], [])

    @property
    def den(self):
        return Polynomial.from_roots(self.poles)

    @property
    def is_zero(self):
        return self.num.is_zero

    @property
    def relative_degree(self):
        return len(self.poles) - self.num.degree

    @property
    def is_proper(self):
        return self.is_zero or self.num.degree <= len(self.poles)

    def is_stable(self, margin=0.0):
        return bool(np.all(self.poles.real < -margin))

    def at_infinity(self):
        if self.is_zero or self.num.degree < len(self.poles):
            return 0.0
        if self.num.degree == len(self.poles):
            return float(self.num.lead)
        return np.inf

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        if self.poles.size:
            gaps = np.abs(s[..., None] - self.poles)
            if np.any(gaps <= 1e-12 * (1.0 + np.abs(self.poles))):
                raise PoleEvaluation(f"evaluation at a pole of {self!r}")
            return self.num(s) / np.prod(s[..., None] - self.poles, axis=-1)
        return self.num(s) + 0j

    def residual_at(self, p):
        """Relative numerator residual ``|num(p)| / eval_scale(num, p)``."""
        scale = self.num.eval_scale(p)
        return abs(self.num(p)) / scale if scale > 0 else 0.0

    def _cancel_inplace(self, tol):
        num = self.num
        poles = list(self.poles)
        i = 0
        while i < len(poles) and num.degree >= 1:
            p = poles[i]
            if not _near_root(num, p, tol):
                i += 1
                continue
            if abs(p.imag) > _REAL_SNAP * (1.0 + abs(p)):
                cands = [k for k in range(len(poles)) if k != i
                         and abs(poles[k] - np.conj(p)) <= POLE_MATCH_TOL * (1 + abs(p))]
                if not cands or num.degree < 2:
                    i += 1
                    continue
                factor = Polynomial([abs(p) ** 2, -2.0 * p.real, 1.0])
                num = divmod(num, factor)[0]
                for k in sorted([i, cands[0]], reverse=True):
                    poles.pop(k)
            else:
                num = divmod(num, Polynomial([-p.real, 1.0]))[0]
                poles.pop(i)
            i = 0
        self.num = num
        self.poles = np.array(poles, dtype=complex)

    def cancelled(self, tol=CANCEL_TOL):
        return RationalFunction.from_poles(self.num, self.poles, tol=tol)

    def cancel_root(self, root, tol):
        """Cancel the pole at ``root`` (and its conjugate) from num and den.

        Returns ``(new_rf, residual)``; ``residual`` is the relative size of
        the numerator at ``root`` before division.  Raises ``ValueError`` if
        ``root`` is not a pole or the residual exceeds ``tol``.
        """
        root = complex(root)
        roots = [root] if abs(root.imag) <= _REAL_SNAP * (1 + abs(root)) else [root, root.conjugate()]
        poles = list(self.poles)
        for r in roots:
            gaps = [abs(p - r) for p in poles]
            if not gaps or min(gaps) > 1e-6 * (1 + abs(r)):
                raise ValueError(f"{r} is not a pole")
            poles.pop(int(np.argmin(gaps)))
        residual = self.residual_at(root)
        if residual > tol:
            raise ValueError(f"numerator residual {residual:.3g} at {root} exceeds {tol:g}")
        factor = Polynomial.from_roots(
            [root.real] if len(roots) == 1 else roots)
        num = divmod(self.num, factor)[0]
        return RationalFunction.from_poles(num, poles), residual

    def __add__(self, other):
        other = as_rational(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        ma, mb = _match(self.poles, other.poles)
        extra_a = self.poles[~ma]
        extra_b = other.poles[~mb]
        num = self.num * Polynomial.from_roots(extra_b) + other.num * Polynomial.from_roots(extra_a)
        return RationalFunction.from_poles(num, np.concatenate([self.poles, extra_b]))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction.from_poles(-self.num, self.poles, cancel=False)

    def __sub__(self, other):
        return self + (-as_rational(other))

    def __rsub__(self, other):
        return as_rational(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            if complex(other).imag != 0:
                raise ValueError("only real scalars are supported")
            return RationalFunction.from_poles(self.num * float(np.real(other)), self.poles, cancel=False)
        other = as_rational(other)
        if self.is_zero or other.is_zero:
            return RationalFunction.constant(0.0)
        return RationalFunction.from_poles(self.num * other.num,
                                           np.concatenate([self.poles, other.poles]))

    __rmul__ = __mul__

    def reciprocal(self):
        if self.is_zero:
            raise SingularMatrix("reciprocal of the zero rational function")
        zeros = poly_roots(self.num) if self.num.degree >= 1 else np.zeros(0, dtype=complex)
        num = Polynomial.from_roots(self.poles, lead=1.0 / self.num.lead)
        return RationalFunction.from_poles(num, zeros)

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return self * (1.0 / other)
        return self * as_rational(other).reciprocal()

    def __rtruediv__(self, other):
        return as_rational(other) * self.reciprocal()

    def __repr__(self):
        return f"RationalFunction(num={self.num.coeffs.tolist()}, den={self.den.coeffs.tolist()})"


def as_rational(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, numbers.Number):
        return RationalFunction.constant(float(np.real(x)))
    if isinstance(x, Polynomial):
        return RationalFunction.from_poles(x, [])
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational function")


class RationalMatrix:
    """Immutable rows x cols grid of :class:`RationalFunction`."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        rows = [tuple(as_rational(e) for e in row) for row in entries]
        if not rows or any(len(r) != len(rows[0]) for r in rows) or not rows[0]:
            raise ShapeError("entries must form a non-empty rectangular grid")
        self.entries = tuple(rows)

    @classmethod
    def constant(cls, a):
        a = np.atleast_2d(np.asarray(a, dtype=float))
        return cls([[float(x) for x in row] for row in a])

    @classmethod
    def identity(cls, n):
        return cls.constant(np.eye(n))

    @classmethod
    def block(cls, blocks):
        """Assemble ``[[A, B], [C, D]]``-style block layouts."""
        rows = []
        for brow in blocks:
            h = brow[0].shape[0]
            if any(b.shape[0] != h for b in brow):
                raise ShapeError("blocks in a row must share their height")
            for i in range(h):
                rows.append([e for b in brow for e in b.entries[i]])
        return cls(rows)

    @property
    def shape(self):
        return len(self.entries), len(self.entries[0])

    def __getitem__(self, idx):
        r, c = idx
        if isinstance(r, int) and isinstance(c, int):
            return self.entries[r][c]
        ri = range(*r.indices(self.shape[0])) if isinstance(r, slice) else [r]
        ci = range(*c.indices(self.shape[1])) if isinstance(c, slice) else [c]
        return RationalMatrix([[self.entries[i][j] for j in ci] for i in ri])

    def __call__(self, s):
        return rm_eval(self, s)

    @property
    def T(self):
        return RationalMatrix(list(zip(*self.entries)))

    def at_infinity(self):
        return np.array([[e.at_infinity() for e in row] for row in self.entries])

    def is_stable(self, margin=0.0):
        return all(e.is_stable(margin) for row in self.entries for e in row)

    def is_proper(self):
        return all(e.is_proper for row in self.entries for e in row)

    def map(self, fn):
        return RationalMatrix([[fn(e) for e in row] for row in self.entries])

    def __add__(self, other):
        return rm_arith("add", self, other)

    def __sub__(self, other):
        return rm_arith("add", self, rm_arith("scalar_mul", -1.0, other))

    def __neg__(self):
        return rm_arith("scalar_mul", -1.0, self)

    def __matmul__(self, other):
        return rm_arith("mul", self, other)

    def __mul__(self, c):
        return rm_arith("scalar_mul", c, self)

    __rmul__ = __mul__

    def inv(self):
        return rm_arith("inverse", self)

    def det(self):
        return rm_det_adj(self)[0]

    def __repr__(self):
        return f"RationalMatrix({self.shape[0]}x{self.shape[1]})"


def rm_eval(R, s):
    """Entrywise value of ``R`` at the complex point ``s``."""
    s = complex(s)
    return np.array([[e(s) for e in row] for row in R.entries], dtype=complex)


def rm_det_adj(R):
    """Determinant and adjugate by cofactor expansion with shared minors."""
    n, m = R.shape
    if n != m:
        raise ShapeError(f"determinant of a non-square {n}x{m} matrix")
    E = R.entries
    memo = {}

    def minor_det(rows, cols):
        key = (rows, cols)
        if key in memo:
            return memo[key]
        if len(rows) == 1:
            val = E[rows[0]][cols[0]]
        else:
            val = RationalFunction.constant(0.0)
            r0, rest = rows[0], rows[1:]
            for k, c in enumerate(cols):
                if E[r0][c].is_zero:
                    continue
                term = E[r0][c] * minor_det(rest, cols[:k] + cols[k + 1:])
                val = val + term if k % 2 == 0 else val - term
        memo[key] = val
        return val

    full = tuple(range(n))
    det = minor_det(full, full)
    if n == 1:
        return det, RationalMatrix.identity(1)
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            cof = minor_det(full[:i] + full[i + 1:], full[:j] + full[j + 1:])
            adj[j][i] = cof if (i + j) % 2 == 0 else -cof
    return det, RationalMatrix(adj)


def rm_arith(op, *args):
    """Rational-matrix arithmetic: ``add``, ``mul``, ``inverse``, ``scalar_mul``."""
    if op == "add":
        a, b = args
        if a.shape != b.shape:
            raise ShapeError(f"cannot add {a.shape} and {b.shape}")
        return RationalMatrix([[x + y for x, y in zip(ra, rb)]
                               for ra, rb in zip(a.entries, b.entries)])
    if op == "mul":
        a, b = args
        if a.shape[1] != b.shape[0]:
            raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
        out = []
        for i in range(a.shape[0]):
            row = []
            for j in range(b.shape[1]):
                acc = RationalFunction.constant(0.0)
                for k in range(a.shape[1]):
                    x, y = a.entries[i][k], b.entries[k][j]
                    if not (x.is_zero or y.is_zero):
                        acc = acc + x * y
                row.append(acc)
            out.append(row)
        return RationalMatrix(out)
    if op == "scalar_mul":
        c, a = args
        if isinstance(c, RationalMatrix):
            c, a = a, c
        return a.map(lambda e: e * c)
    if op == "inverse":
        (a,) = args
        det, adj = rm_det_adj(a)
        if det.is_zero:
            raise SingularMatrix("determinant is identically zero")
        inv_det = det.reciprocal()
        return adj.map(lambda e: e * inv_det)
    raise ValueError(f"unknown operation {op!r}")
