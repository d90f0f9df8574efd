"""Exact and arbitrary-precision scalar kernel.

Univariate polynomials and rational functions over any field-like scalar
type (``fractions.Fraction``, :class:`frobg2.radicals.RadicalElem`, or
mpmath ``mpf``/``mpc``), plus the three analytic primitives the rest of
the package leans on:

* ``poly_roots``   -- all complex roots at a requested bit precision,
* ``residue``      -- residue of a rational function at a finite point
                      or at infinity (pole order up to 8),
* ``resultant``    -- Sylvester resultant, exact over exact scalars.

Root finding uses the Aberth-Ehrlich simultaneous iteration with
deterministic starting points on a Cauchy-bound circle; if it stalls we
fall back to mpmath's companion-matrix solver.  Residues are computed by
local power-series expansion, never by numerical contour integration.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

DEFAULT_PRECISION = 256
MAX_POLE_ORDER = 8


class NonConvergenceError(Exception):
    """Root finding or series expansion failed to reach the target accuracy."""


def _is_zero(c):
    z = getattr(c, "is_zero", None)
    if z is not None:
        return z()
    return c == 0


def _one_like(c):
    if isinstance(c, (Fraction, int)):
        return Fraction(1)
    one = getattr(c, "one", None)
    if one is not None:
        return one()
    return mpmath.mpf(1)


class Poly:
    """Dense univariate polynomial, coefficients in ascending order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while coeffs and _is_zero(coeffs[-1]):
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @property
    def degree(self):
        """Degree, or -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return "Poly(%r)" % (list(self.coeffs),)

    def __call__(self, x):
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        if acc is None:
            return 0 * x  # zero in the scalar type of x
        return acc

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return Poly([])
        out = [None] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                p = a * b
                out[i + j] = p if out[i + j] is None else out[i + j] + p
        return Poly(out)

    __rmul__ = __mul__

    def deriv(self, k=1):
        p = self
        for _ in range(k):
            p = Poly([c * (i + 1) for i, c in enumerate(p.coeffs[1:])])
        return p

    def shift(self, a):
        """Return p(x + a) via repeated synthetic division."""
        cs = list(self.coeffs)
        n = len(cs)
        for k in range(n):
            for i in range(n - 2, k - 1, -1):
                cs[i] = cs[i] + a * cs[i + 1]
        return Poly(cs)

    def reversed(self, degree=None):
        """Coefficient reversal x^d p(1/x); pads with zeros up to degree."""
        d = self.degree if degree is None else degree
        out = [self.coeffs[0] * 0] * (d + 1)
        for i, c in enumerate(self.coeffs):
            out[d - i] = c
        return Poly(out)

    def monic(self):
        lead = self.coeffs[-1]
        inv = _scalar_inv(lead)
        return Poly([c * inv for c in self.coeffs])

    def divmod(self, other):
        """Polynomial division; requires invertible leading coefficient."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        inv = _scalar_inv(other.coeffs[-1])
        rem = list(self.coeffs)
        q = [self.coeffs[0] * 0] * max(0, len(rem) - len(other.coeffs) + 1)
        while len(rem) >= len(other.coeffs) and rem:
            k = len(rem) - len(other.coeffs)
            f = rem[-1] * inv
            q[k] = f
            for i, c in enumerate(other.coeffs):
                rem[k + i] = rem[k + i] - f * c
            while rem and _is_zero(rem[-1]):
                rem.pop()
        return Poly(q), Poly(rem)


def _scalar_inv(c):
    if isinstance(c, (Fraction, int)):
        return Fraction(1) / Fraction(c)
    inv = getattr(c, "inverse", None)
    if inv is not None:
        return inv()
    return 1 / c


def poly_gcd(a, b):
    """Monic gcd over a field (exact scalars only)."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    if a.is_zero():
        return a
    return a.monic()


class RationalFunction:
    """Quotient of two polynomials; cancels the gcd for exact scalars."""

    __slots__ = ("num", "den")

    def __init__(self, num, den, exact=True):
        if not isinstance(num, Poly):
            num = Poly([num])
        if not isinstance(den, Poly):
            den = Poly([den])
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if exact and not num.is_zero():
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = num.divmod(g)[0]
                den = den.divmod(g)[0]
        self.num = num
        self.den = den

    def __call__(self, x):
        return self.num(x) * _scalar_inv(self.den(x))

    def deriv(self):
        n, d = self.num, self.den
        return RationalFunction(n.deriv() * d - n * d.deriv(), d * d, exact=False)


# ---------------------------------------------------------------------------
# residues


def _series_inverse(coeffs, order, zero):
    """Multiplicative inverse of a power series, to the given order."""
    c0 = coeffs[0]
    inv0 = _scalar_inv(c0)
    out = [inv0] + [zero] * (order - 1)
    for k in range(1, order):
        acc = zero
        for j in range(1, k + 1):
            cj = coeffs[j] if j < len(coeffs) else zero
            acc = acc + cj * out[k - j]
        out[k] = -inv0 * acc
    return out


def residue(num, den, location, exact=True, tol=None):
    """Residue of num/den at a finite location.

    Returns 0 (in the scalar type of ``location``) when the location is
    not actually a pole.  Pole order is capped at MAX_POLE_ORDER.  For
    inexact scalars, coefficients smaller than ``tol`` times the largest
    shifted denominator coefficient are treated as zero when detecting
    the pole order.
    """
    ds = den.shift(location)
    ns = num.shift(location)
    zero = location * 0
    dc = list(ds.coeffs)
    if not exact:
        scale = max(abs(c) for c in dc) if dc else mpmath.mpf(1)
        if tol is None:
            tol = mpmath.mpf(2) ** (-(mpmath.mp.prec * 3) // 4)
        cut = scale * tol
        m = 0
        while m < len(dc) and abs(dc[m]) <= cut:
            m += 1
    else:
        m = 0
        while m < len(dc) and _is_zero(dc[m]):
            m += 1
    if m == 0:
        return zero
    if m > MAX_POLE_ORDER:
        raise NonConvergenceError("pole order %d exceeds cap %d" % (m, MAX_POLE_ORDER))
    if m >= len(dc):
        raise ZeroDivisionError("denominator vanishes identically at location")
    d1 = dc[m:]  # den / w^m, unit constant term
    inv = _series_inverse(d1, m, zero)
    acc = zero
    for j in range(m):
        nj = ns.coeffs[j] if j < len(ns.coeffs) else zero
        acc = acc + nj * inv[m - 1 - j]
    return acc


def residue_at_infinity(num, den, exact=True):
    """Residue at infinity: minus the z^{-1} coefficient of num/den."""
    dn, dd = num.degree, den.degree
    if dn < 0:
        return den.coeffs[0] * 0
    nr = num.reversed()
    dr = den.reversed()
    # res_inf = -res_{w=0} [ w^{dd-dn-2} * nr(w)/dr(w) ]
    e = dd - dn - 2
    if e >= 0:
        nr = nr * Poly([nr.coeffs[0] * 0] * e + [_one_like(nr.coeffs[0])])
        e = 0
    order = -e
    if order == 0:
        return den.coeffs[0] * 0
    zero = den.coeffs[0] * 0
    inv = _series_inverse(list(dr.coeffs), order, zero)
    acc = zero
    for j in range(order):
        nj = nr.coeffs[j] if j < len(nr.coeffs) else zero
        acc = acc + nj * inv[order - 1 - j]
    return -acc


# ---------------------------------------------------------------------------
# resultant


def resultant(p, q):
    """Sylvester resultant; exact over Fraction or radical coefficients."""
    m, n = p.degree, q.degree
    if m < 0 or n < 0:
        return Fraction(0)
    if m == 0:
        return p.coeffs[0] ** n
    if n == 0:
        return q.coeffs[0] ** m
    size = m + n
    zero = p.coeffs[0] * 0
    rows = []
    pc = list(reversed(p.coeffs))
    qc = list(reversed(q.coeffs))
    for i in range(n):
        rows.append([zero] * i + pc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + qc + [zero] * (size - n - 1 - i))
    return _det(rows)


def _det(rows):
    """Determinant by Gaussian elimination over a field, with pivoting."""
    n = len(rows)
    det = _one_like(rows[0][0]) if n else Fraction(1)
    sign = 1
    numeric = isinstance(rows[0][0], (mpmath.mpf, mpmath.mpc, float, complex))
    for col in range(n):
        piv = None
        if numeric:
            best = -1
            for r in range(col, n):
                a = abs(rows[r][col])
                if a > best:
                    best, piv = a, r
            if best == 0:
                return det * 0
        else:
            for r in range(col, n):
                if not _is_zero(rows[r][col]):
                    piv = r
                    break
            if piv is None:
                return det * 0
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            sign = -sign
        pv = rows[col][col]
        det = det * pv
        inv = _scalar_inv(pv)
        for r in range(col + 1, n):
            f = rows[r][col] * inv
            if _is_zero(f):
                continue
            rr, rc = rows[r], rows[col]
            for c in range(col + 1, n):
                rr[c] = rr[c] - f * rc[c]
    return det if sign > 0 else -det


# ---------------------------------------------------------------------------
# root finding


def _to_mpc(c):
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    to = getattr(c, "to_mpc", None)
    if to is not None:
        return to()
    return mpmath.mpc(c)


def poly_roots(p, precision=DEFAULT_PRECISION, maxiter=400):
    """All complex roots of p, sorted by (real, imaginary) part.

    Aberth-Ehrlich iteration at working precision 2*precision with
    deterministic starting points; accepts when the summed relative
    residual drops below 2**(-precision/2).  Falls back to mpmath's
    companion-matrix solver before giving up.
    """
    if p.degree < 1:
        raise ValueError("need degree >= 1")
    with mpmath.workprec(2 * precision):
        coeffs = [_to_mpc(c) for c in p.coeffs]
        n = p.degree
        lead = coeffs[-1]
        mono = [c / lead for c in coeffs]
        dcoef = [mono[i] * i for i in range(1, n + 1)]
        bound = 1 + max(abs(c) for c in mono[:-1]) if n else mpmath.mpf(1)
        # deterministic spiral of starting points, never symmetric about R
        roots = [
            bound * mpmath.exp(mpmath.mpc(0, 2 * mpmath.pi * (k + Fraction(1, 3)) / n))
            * (mpmath.mpf(1) - mpmath.mpf(k) / (4 * n))
            for k in range(n)
        ]
        target = mpmath.mpf(2) ** (-(precision // 2))
        scale = max(abs(c) for c in mono)

        def horner(cs, x):
            acc = mpmath.mpc(0)
            for c in reversed(cs):
                acc = acc * x + c
            return acc

        def total_residual(rs):
            return sum(abs(horner(mono, r)) for r in rs) / scale

        ok = False
        for _ in range(maxiter):
            moved = mpmath.mpf(0)
            for k in range(n):
                z = roots[k]
                pv = horner(mono, z)
                dv = horner(dcoef, z)
                if dv == 0:
                    z = z + mpmath.mpf(1) / (100 * (k + 1))
                    roots[k] = z
                    continue
                newton = pv / dv
                s = mpmath.mpc(0)
                for j in range(n):
                    if j != k:
                        dz = z - roots[j]
                        if dz == 0:
                            dz = mpmath.mpf(2) ** (-precision) * (1 + abs(z))
                        s += 1 / dz
                denom = 1 - newton * s
                step = newton / denom if denom != 0 else newton
                roots[k] = z - step
                moved = max(moved, abs(step) / (1 + abs(roots[k])))
            if moved < mpmath.mpf(2) ** (-precision - 8):
                break
        if total_residual(roots) < target:
            ok = True
        if not ok:
            try:
                roots = mpmath.polyroots(
                    list(reversed(mono)), maxsteps=200, extraprec=2 * precision
                )
                roots = [mpmath.mpc(r) for r in roots]
            except mpmath.libmp.NoConvergence as exc:
                raise NonConvergenceError(str(exc)) from exc
            if total_residual(roots) >= target:
                raise NonConvergenceError(
                    "residual %s above 2^-%d" % (total_residual(roots), precision // 2)
                )
        roots.sort(key=lambda r: (r.real, r.imag))
        return [mpmath.mpc(r) for r in roots]
