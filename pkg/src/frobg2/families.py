"""Concrete semisimple Frobenius data for the verification suites.

Every family is sampled through its closed-form parametrization: the
superpotential's critical points supply the canonical coordinates, the
Hessian values supply the Lame coefficients h_i, and the printed
rotation-coefficient formulas supply gamma_ij.  The polynomial families
(``An``, ``Dn``) and the two-dimensional family are sampled exactly, in
a square-root extension of the rationals; the exceptional and orbifold
families go through high-precision complex root finding.

Besides the samplers the module carries the families' closed-form
constants (the O1 - O2 values), the G-function gradient checks, and the
residue-identity suites that re-run the printed residue computations on
freshly drawn parameters.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .algebra import Algebra, EvalContext, random_rational
from .correlators import CorrelatorTable
from .exact import Poly, poly_roots, residue, residue_at_infinity
from .radicals import RadicalElem, RadicalField, radical_tower
from .report import (
    DEFAULT_PRECISION,
    DEFAULT_SEED,
    VerificationReport,
    point_digest,
    relative_tolerance,
)

MAX_RESAMPLE = 200
EXACT_KINDS = ("An", "Dn", "TwoDim")
ADE_KINDS = ("An", "Dn", "E6", "E7", "E8")


class DegenerateSample(Exception):
    """Every resampling attempt hit a degenerate configuration."""


# ---------------------------------------------------------------------------
# specs and sample points


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    n: int = 0
    p: int = 0
    q: int = 0
    r: int = 0
    mu1: Fraction = Fraction(0)

    @staticmethod
    def An(n):
        if n < 1:
            raise ValueError("An needs n >= 1")
        return FamilySpec("An", n=n)

    @staticmethod
    def Dn(n):
        if n < 3:
            raise ValueError("Dn needs n >= 3")
        return FamilySpec("Dn", n=n)

    @staticmethod
    def E6():
        return FamilySpec("E6", n=6)

    @staticmethod
    def E7():
        return FamilySpec("E7", n=7)

    @staticmethod
    def E8():
        return FamilySpec("E8", n=8)

    @staticmethod
    def ApqOrbifold(p, q):
        if p < 1 or q < 1:
            raise ValueError("ApqOrbifold needs p, q >= 1")
        return FamilySpec("Apq", n=p + q, p=p, q=q)

    @staticmethod
    def DrOrbifold(r):
        if r < 1:
            raise ValueError("DrOrbifold needs r >= 1")
        return FamilySpec("Dr", n=r + 3, r=r)

    @staticmethod
    def TwoDim(mu1):
        mu1 = Fraction(mu1)
        if mu1 == 0:
            raise ValueError("TwoDim needs mu1 != 0")
        return FamilySpec("TwoDim", n=2, mu1=mu1)

    @property
    def dimension(self):
        return self.n

    @property
    def exact(self):
        return self.kind in EXACT_KINDS

    @property
    def label(self):
        if self.kind == "An":
            return "An(%d)" % self.n
        if self.kind == "Dn":
            return "Dn(%d)" % self.n
        if self.kind == "Apq":
            return "Apq(%d,%d)" % (self.p, self.q)
        if self.kind == "Dr":
            return "Dr(%d)" % self.r
        if self.kind == "TwoDim":
            return "TwoDim(%s)" % self.mu1
        return self.kind


@dataclass
class SamplePoint:
    n: int
    us: list
    hs: list
    gammas: dict
    jets: dict
    provenance: dict = field(default_factory=dict)
    internal: dict = field(default_factory=dict)

    def context(self):
        mode = self.provenance.get("mode", "exact")
        return EvalContext(self.n, self.us, self.hs, self.gammas, self.jets,
                           mode=mode)

    def digest(self):
        return point_digest(self.provenance.get("draw"))

    def to_json(self):
        prec = self.provenance.get("precision", DEFAULT_PRECISION)
        return json.dumps(
            {
                "n": self.n,
                "u": [_scalar_json(v, prec) for v in self.us],
                "h": [_scalar_json(v, prec) for v in self.hs],
                "gamma": {
                    "%d,%d" % k: _scalar_json(v, prec)
                    for k, v in sorted(self.gammas.items())
                },
                "jets": {
                    "%d,%d" % k: _scalar_json(v, prec)
                    for k, v in sorted(self.jets.items())
                },
                "provenance": {
                    k: v for k, v in self.provenance.items() if k != "draw"
                },
            }
        )


def _scalar_json(v, prec):
    """Rationals as num/den strings, everything else as full-precision
    decimal strings (re, im pair for complex values)."""
    if isinstance(v, (int, Fraction)):
        v = Fraction(v)
        return "%d/%d" % (v.numerator, v.denominator)
    if isinstance(v, RadicalElem):
        v = v.to_mpc(prec)
    dps = mpmath.libmp.prec_to_dps(prec) + 3
    v = mpmath.mpc(v)
    return [mpmath.nstr(v.real, dps), mpmath.nstr(v.imag, dps)]


# ---------------------------------------------------------------------------
# shared sampling helpers


def _random_jets(rng, n, bound=50, orders=6):
    jets = {}
    for i in range(1, n + 1):
        for p in range(1, orders + 1):
            v = random_rational(rng, bound)
            while p == 1 and v == 0:
                v = random_rational(rng, bound)
            jets[(i, p)] = v
    return jets


def _antiderivative(p):
    return Poly([Fraction(0)] + [c / (k + 1) for k, c in enumerate(p.coeffs)])


def _monic_from_roots(roots, lead=Fraction(1)):
    out = Poly([lead])
    for r in roots:
        out = out * Poly([-r, Fraction(1)])
    return out


def _rand_mpc(rng, bound=8):
    re = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
    im = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
    return (re, im)


def _to_mpc(pair):
    re, im = pair
    return mpmath.mpc(
        mpmath.mpf(re.numerator) / re.denominator,
        mpmath.mpf(im.numerator) / im.denominator,
    )


def _rat_deriv(num, den):
    """Derivative of num/den as a (num, den) pair, no cancellation."""
    return num.deriv() * den - num * den.deriv(), den * den


def _min_sep(vals):
    best = None
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            d = abs(vals[i] - vals[j])
            if best is None or d < best:
                best = d
    return best


def _spread(vals):
    worst = mpmath.mpf(0)
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            d = abs(vals[i] - vals[j])
            if d > worst:
                worst = d
    return worst


# ---------------------------------------------------------------------------
# exact samplers


def _sample_an(spec, rng):
    n = spec.n
    for _ in range(MAX_RESAMPLE):
        zs = [random_rational(rng, 12) for _ in range(n - 1)]
        zs.append(-sum(zs, Fraction(0)))
        if len(set(zs)) != n:
            continue
        lam1 = _monic_from_roots(zs, Fraction(n + 1))
        shift = random_rational(rng, 12)
        lam = _antiderivative(lam1) + Poly([shift])
        lam2 = lam1.deriv()
        rads = [lam2(z) for z in zs]
        if any(r == 0 for r in rads):
            continue
        us = [lam(z) for z in zs]
        if len(set(us)) != n:
            continue
        fld, roots = radical_tower(rads)
        hs = [roots[i] / rads[i] for i in range(n)]
        gammas = {}
        for i in range(n):
            for j in range(i + 1, n):
                gammas[(i + 1, j + 1)] = hs[i] * hs[j] / (zs[i] - zs[j]) ** 2
        return {
            "us": us, "hs": hs, "gammas": gammas,
            "zs": zs, "lam": lam, "lam1": lam1, "shift": shift,
            "eta": [Fraction(1) / r for r in rads],
            "draw": ("An", n, zs, shift),
        }
    raise DegenerateSample(spec.label)


def _dn_xs(rng, n, bound=12):
    """n - 1 free nonzero rationals plus the reciprocal-sum closure."""
    xs = [random_rational(rng, bound) for _ in range(n - 1)]
    if any(x == 0 for x in xs):
        return None
    s = sum((Fraction(1) / x for x in xs), Fraction(0))
    if s == 0:
        return None
    xs.append(Fraction(-1) / s)
    if len(set(xs)) != n:
        return None
    return xs


def _dn_lambda(xs, n, shift):
    """lambda = N(x)/x with the reciprocal-sum constraint killing the
    logarithmic term of the antiderivative."""
    prod = _monic_from_roots(xs)
    c = list(prod.coeffs)
    if (n - 1) * c[1] != 0:
        raise AssertionError("xi^-1 coefficient of the integrand survived")
    poly_part = [Fraction(0)] * n
    poly_part[0] = shift
    for j in range(2, n + 1):
        poly_part[j - 1] = Fraction(n - 1) * c[j] / (j - 1)
    num = Poly(poly_part) * Poly([Fraction(0), Fraction(1)])
    num = num + Poly([-Fraction(n - 1) * c[0]])
    return num  # lambda(x) = num(x) / x


def _sample_dn(spec, rng):
    n = spec.n
    for _ in range(MAX_RESAMPLE):
        xs = _dn_xs(rng, n)
        if xs is None:
            continue
        shift = random_rational(rng, 12)
        num = _dn_lambda(xs, n, shift)
        n1, d1 = _rat_deriv(num, Poly([Fraction(0), Fraction(1)]))
        n2, d2 = _rat_deriv(n1, d1)
        lam2 = [n2(x) / d2(x) for x in xs]
        rads = [2 * x * l2 for x, l2 in zip(xs, lam2)]
        if any(r == 0 for r in rads):
            continue
        us = [num(x) / x for x in xs]
        if len(set(us)) != n:
            continue
        fld, roots = radical_tower(rads)
        hs = [roots[i] / rads[i] for i in range(n)]
        gammas = {}
        for i in range(n):
            for j in range(i + 1, n):
                gammas[(i + 1, j + 1)] = (
                    (xs[i] + xs[j]) * hs[i] * hs[j] / (xs[i] - xs[j]) ** 2
                )
        return {
            "us": us, "hs": hs, "gammas": gammas,
            "xs": xs, "num": num, "shift": shift,
            "eta": [Fraction(1) / r for r in rads],
            "draw": ("Dn", n, xs, shift),
        }
    raise DegenerateSample(spec.label)


def _sample_twodim(spec, rng):
    fld = RadicalField([Fraction(-1)])
    imag = fld.sqrt_gen(0)
    while True:
        u1, u2 = random_rational(rng, 50), random_rational(rng, 50)
        if u1 != u2:
            break
    h2 = random_rational(rng, 50)
    while h2 == 0:
        h2 = random_rational(rng, 50)
    # h1 is a square root of -h2^2; the branch is calibrated against the
    # measured invariants of genuine two-dimensional points (A1xA1, A2 and
    # the (1,1) orbifold land at mu1 = 0, 1/6 and 1/2 respectively, where
    # the genus-two correction vanishes identically)
    hs = [-imag * h2, fld.rational(h2)]
    gammas = {(1, 2): imag * (-spec.mu1) / (u1 - u2)}
    return {
        "us": [u1, u2], "hs": hs, "gammas": gammas,
        "eta": [hs[0] * hs[0], hs[1] * hs[1]],
        "draw": ("TwoDim", str(spec.mu1), u1, u2, h2),
    }


# ---------------------------------------------------------------------------
# numeric samplers


def _conditioning_ok(ys, extra=()):
    spread = _spread(ys)
    if spread == 0:
        return False
    cut = spread * mpmath.mpf("1e-3")
    if _min_sep(ys) < cut:
        return False
    return all(abs(v) >= cut for v in extra)


def _numeric_point(us, hs, gammas, extras, draw):
    if _min_sep(us) == 0:
        return None
    out = {"us": us, "hs": hs, "gammas": gammas, "draw": draw}
    out.update(extras)
    return out


def _sample_e68(spec, rng, precision):
    nu = spec.n // 2
    for _ in range(MAX_RESAMPLE):
        draws = [_rand_mpc(rng) for _ in range(2 * nu)]
        if draws[0] == (0, 0):
            continue
        ts = [_to_mpc(d) for d in draws]
        # p(y) = sum t_k y^{nu-k}, q(y) = y^{nu+1} + sum t_{nu+k} y^{nu-k}
        p = Poly(list(reversed(ts[:nu])))
        q = Poly(list(reversed(ts[nu:])) + [mpmath.mpf(0), mpmath.mpf(1)])
        pp, qp = p.deriv(), q.deriv()
        big_r = 3 * (qp * qp) + p * (pp * pp)
        try:
            ys = poly_roots(big_r, precision)
        except Exception:
            continue
        if not _conditioning_ok(ys, [pp(y) for y in ys]):
            continue
        rp = big_r.deriv()
        xs = [-qp(y) / pp(y) for y in ys]
        eta = [-pp(y) / rp(y) for y in ys]
        if any(v == 0 for v in eta):
            continue
        hs = [mpmath.sqrt(v) for v in eta]
        us = [x**3 + p(y) * x + q(y) for x, y in zip(xs, ys)]
        gammas = {}
        for i in range(spec.n):
            for j in range(i + 1, spec.n):
                gammas[(i + 1, j + 1)] = (
                    3 * hs[i] * hs[j] * (xs[i] + xs[j]) / (ys[i] - ys[j]) ** 2
                )
        out = _numeric_point(us, hs, gammas,
                             {"ys": ys, "xs": xs, "eta": eta,
                              "p": p, "q": q, "R": big_r},
                             (spec.kind, draws))
        if out is not None:
            return out
    raise DegenerateSample(spec.label)


def _sample_e7(spec, rng, precision):
    for _ in range(MAX_RESAMPLE):
        draws = [_rand_mpc(rng) for _ in range(7)]
        if draws[0] == (0, 0):
            continue
        t = [_to_mpc(d) for d in draws]
        p = Poly([t[1], t[0]])
        q = Poly([t[3], t[2], mpmath.mpf(0), mpmath.mpf(1)])
        r = Poly([t[6], t[5], t[4]])
        pp, qp, rp_ = p.deriv(), q.deriv(), r.deriv()
        big_p = 2 * (p * pp) - 3 * qp
        big_q = 3 * rp_ - pp * q
        big_s = q * qp - 2 * (p * rp_)
        big_r = big_q * big_q - big_p * big_s
        try:
            ys = poly_roots(big_r, precision)
        except Exception:
            continue
        if not _conditioning_ok(ys, [big_p(y) for y in ys]):
            continue
        rd = big_r.deriv()
        xs = [big_q(y) / big_p(y) for y in ys]
        eta = [big_p(y) / rd(y) for y in ys]
        if any(v == 0 for v in eta):
            continue
        hs = [mpmath.sqrt(v) for v in eta]
        xt = [x + p(y) / 3 for x, y in zip(xs, ys)]
        us = [x**3 + p(y) * x**2 + q(y) * x + r(y) for x, y in zip(xs, ys)]
        gammas = {}
        for i in range(7):
            for j in range(i + 1, 7):
                gammas[(i + 1, j + 1)] = (
                    3 * hs[i] * hs[j] * (xt[i] + xt[j]) / (ys[i] - ys[j]) ** 2
                )
        out = _numeric_point(us, hs, gammas,
                             {"ys": ys, "xs": xs, "eta": eta,
                              "p": p, "q": q, "rpoly": r},
                             ("E7", draws))
        if out is not None:
            return out
    raise DegenerateSample(spec.label)


def _apq_numerator(pdeg, qdeg, a, b, tn, tn1):
    """lambda(z) = N(z)/z^q for the A-orbifold superpotential."""
    one = mpmath.mpf(1)
    p1 = [mpmath.mpf(0)] * (pdeg + 1)
    p1[pdeg] = one
    for k in range(1, pdeg):
        p1[k] = a[k]
    p1[0] = tn1
    num = Poly(p1) * Poly([mpmath.mpf(0)] * qdeg + [one])
    tail = [mpmath.mpf(0)] * (qdeg + 1)
    tail[0] = tn**qdeg
    for k in range(1, qdeg):
        tail[qdeg - k] = b[k] * tn**k
    return num + Poly(tail)


def _sample_apq(spec, rng, precision):
    pdeg, qdeg = spec.p, spec.q
    for _ in range(MAX_RESAMPLE):
        a = {k: _to_mpc(_rand_mpc(rng)) for k in range(1, pdeg)}
        b = {k: _to_mpc(_rand_mpc(rng)) for k in range(1, qdeg)}
        adraw = sorted((k, _fracpair(v)) for k, v in a.items())
        bdraw = sorted((k, _fracpair(v)) for k, v in b.items())
        tn_draw = _rand_mpc(rng)
        if tn_draw == (0, 0):
            continue
        tn = _to_mpc(tn_draw)
        tn1_draw = _rand_mpc(rng)
        tn1 = _to_mpc(tn1_draw)
        num = _apq_numerator(pdeg, qdeg, a, b, tn, tn1)
        zpoly = Poly([mpmath.mpf(0), mpmath.mpf(1)])
        n1 = num.deriv() * zpoly - qdeg * num        # lambda' = n1 / z^(q+1)
        n2 = n1.deriv() * zpoly - (qdeg + 1) * n1    # lambda'' = n2 / z^(q+2)
        try:
            zs = poly_roots(n1, precision)
        except Exception:
            continue
        if not _conditioning_ok(zs, zs):
            continue
        lam2 = [n2(z) / z ** (qdeg + 2) for z in zs]
        eta_up = [-z * z * l2 for z, l2 in zip(zs, lam2)]
        if any(v == 0 for v in eta_up):
            continue
        hs = [1 / mpmath.sqrt(v) for v in eta_up]
        us = [num(z) / z**qdeg for z in zs]
        gammas = {}
        for i in range(spec.n):
            for j in range(i + 1, spec.n):
                gammas[(i + 1, j + 1)] = (
                    -hs[i] * hs[j] * zs[i] * zs[j] / (zs[i] - zs[j]) ** 2
                )
        out = _numeric_point(us, hs, gammas,
                             {"zs": zs, "eta": [1 / v for v in eta_up],
                              "a": a, "b": b, "tn": tn, "tn1": tn1},
                             ("Apq", pdeg, qdeg, adraw, bdraw,
                              tn_draw, tn1_draw))
        if out is not None:
            return out
    raise DegenerateSample(spec.label)


def _fracpair(v):
    return (mpmath.nstr(v.real, 12), mpmath.nstr(v.imag, 12))


def _sample_dr(spec, rng, precision):
    r = spec.r
    for _ in range(MAX_RESAMPLE):
        cdraw = [_rand_mpc(rng) for _ in range(r + 1)]
        if cdraw[-1] == (0, 0):
            continue
        t1_draw, t2_draw = _rand_mpc(rng), _rand_mpc(rng)
        if t1_draw == (0, 0) or t2_draw == (0, 0):
            continue
        c = [_to_mpc(d) for d in cdraw]
        t1, t2 = _to_mpc(t1_draw), _to_mpc(t2_draw)
        den = Poly([mpmath.mpf(-4), mpmath.mpf(0), mpmath.mpf(1)])
        num = Poly(c) * den + Poly([t1 * t1 + t2 * t2, t1 * t2])
        n1, d1 = _rat_deriv(num, den)
        try:
            zs = poly_roots(Poly([x / n1.coeffs[-1] for x in n1.coeffs]),
                            precision)
        except Exception:
            continue
        if not _conditioning_ok(zs, [z * z - 4 for z in zs]):
            continue
        n2, d2 = _rat_deriv(n1, d1)
        lam2 = [n2(z) / d2(z) for z in zs]
        eta_up = [(4 - z * z) * l2 for z, l2 in zip(zs, lam2)]
        if any(v == 0 for v in eta_up):
            continue
        hs = [1 / mpmath.sqrt(v) for v in eta_up]
        us = [num(z) / (z * z - 4) for z in zs]
        gammas = {}
        for i in range(spec.n):
            for j in range(i + 1, spec.n):
                gammas[(i + 1, j + 1)] = (
                    hs[i] * hs[j] * (4 - zs[i] * zs[j]) / (zs[i] - zs[j]) ** 2
                )
        out = _numeric_point(us, hs, gammas,
                             {"zs": zs, "eta": [1 / v for v in eta_up],
                              "c": c, "t1": t1, "t2": t2},
                             ("Dr", r, cdraw, t1_draw, t2_draw))
        if out is not None:
            return out
    raise DegenerateSample(spec.label)


_SAMPLERS_EXACT = {"An": _sample_an, "Dn": _sample_dn, "TwoDim": _sample_twodim}
_SAMPLERS_NUMERIC = {
    "E6": _sample_e68,
    "E8": _sample_e68,
    "E7": _sample_e7,
    "Apq": _sample_apq,
    "Dr": _sample_dr,
}


def sample(spec, seed=DEFAULT_SEED, precision=DEFAULT_PRECISION):
    """Draw a SamplePoint of the family; pure in (spec, seed, precision)."""
    rng = random.Random("%s|%s" % (seed, spec.label))
    if spec.kind in _SAMPLERS_EXACT:
        data = _SAMPLERS_EXACT[spec.kind](spec, rng)
        mode = "exact"
    else:
        with mpmath.workprec(precision + 64):
            data = _SAMPLERS_NUMERIC[spec.kind](spec, rng, precision)
        mode = "numeric"
    jets = _random_jets(rng, spec.n)
    point = SamplePoint(
        n=spec.n,
        us=data.pop("us"),
        hs=data.pop("hs"),
        gammas=data.pop("gammas"),
        jets=jets,
        provenance={
            "family": spec.label,
            "seed": seed,
            "precision": precision,
            "mode": mode,
            "draw": data.pop("draw"),
        },
    )
    point.internal = data
    return point


# ---------------------------------------------------------------------------
# closed forms


def closed_form_o_difference(spec):
    """The family's O1 - O2 value as an exact rational."""
    if spec.kind in ADE_KINDS:
        return Fraction(0)
    if spec.kind == "Apq":
        p, q = spec.p, spec.q
        return Fraction(p**3 + q**3 - p - q, 6)
    if spec.kind == "Dr":
        r = spec.r
        return Fraction(r**3 - r, 6) + 2
    if spec.kind == "TwoDim":
        return Fraction(0)
    raise ValueError("unknown family kind %r" % spec.kind)


def orbifold_o_difference(p, q, r):
    """The conjectural A/D/E-orbifold value, exposed for reference."""
    return Fraction(p**3 + q**3 + r**3 - p - q - r, 6)


# ---------------------------------------------------------------------------
# numeric comparison helper


def _residual_ok(val, precision, scale=1):
    tol = relative_tolerance(precision)
    base = max(1.0, float(abs(scale)))
    return float(abs(val)) <= tol * base


# ---------------------------------------------------------------------------
# G-function gradients


def _lambda_parameter_basis(spec, point):
    """Rows of the u-to-parameter Jacobian: the partial of lambda in
    each sampled parameter, as a function evaluated at the critical
    points.  The distinguished parameter (t_n or the leading
    coefficient) is listed last."""
    zs = point.internal["zs"]
    if spec.kind == "Apq":
        pdeg, qdeg = spec.p, spec.q
        b = point.internal["b"]
        tn = point.internal["tn"]
        cols = []
        for k in range(1, pdeg):
            cols.append([z**k for z in zs])
        for k in range(1, qdeg):
            cols.append([(tn / z) ** k for z in zs])
        cols.append([mpmath.mpf(1)] * len(zs))  # t_{n-1}
        dtn = []
        for z in zs:
            acc = qdeg * tn ** (qdeg - 1) / z**qdeg
            for k in range(1, qdeg):
                acc += b[k] * k * tn ** (k - 1) / z**k
            dtn.append(acc)
        cols.append(dtn)
        return cols, tn
    if spec.kind == "Dr":
        r = spec.r
        t1, t2 = point.internal["t1"], point.internal["t2"]
        cols = []
        for k in range(r):
            cols.append([z**k for z in zs])
        cols.append([(2 * t1 + z * t2) / (z * z - 4) for z in zs])
        cols.append([(z * t1 + 2 * t2) / (z * z - 4) for z in zs])
        cols.append([z**r for z in zs])  # leading coefficient, kept last
        return cols, point.internal["c"][r]
    raise ValueError("no lambda parametrization for %r" % spec.kind)


def _log_tn_gradient(spec, point):
    """d(log t_n)/du_i for all i, through the parameter Jacobian."""
    cols, tn = _lambda_parameter_basis(spec, point)
    n = point.n
    jac = mpmath.matrix(n, n)
    for i in range(n):
        for m in range(n):
            jac[i, m] = cols[m][i]
    inv = jac**-1
    return [inv[n - 1, i] / tn for i in range(n)]


def gfunction_gradient_check(point, spec, precision=None):
    """Verify the genus-one G-function gradient against the family's
    closed form: zero for the polynomial and exceptional families,
    eta_ii/24 with d(log t_n)/du_i = -eta_ii (r-scaled for the
    D-orbifold) on the orbifold families."""
    if precision is None:
        precision = point.provenance.get("precision", DEFAULT_PRECISION)
    report = VerificationReport(
        command="verify-gfunction", n=point.n, family=spec.label,
        precision=precision,
    )
    table = CorrelatorTable(Algebra(point.n))
    digest = point.digest()
    with mpmath.workprec(precision + 64):
        ctx = point.context()
        grads = [ctx.evaluate(table.g_gradient(i)) for i in table.alg.indices()]
        if spec.kind in ADE_KINDS:
            for val in grads:
                if spec.exact:
                    ok = _is_exact_zero(val)
                else:
                    ok = _residual_ok(val, precision, ctx.stats.max_mag)
                report.add_trial(digest, _res_str(val), ok)
            return report
        if spec.kind == "TwoDim":
            raise ValueError("no G-function closed form for the 2D family")
        scale = spec.r if spec.kind == "Dr" else 1
        eta = point.internal["eta"]
        logt = _log_tn_gradient(spec, point)
        for i, val in enumerate(grads):
            res1 = val - eta[i] / 24
            res2 = logt[i] + scale * eta[i]
            ok = (_residual_ok(res1, precision, ctx.stats.max_mag)
                  and _residual_ok(res2, precision, eta[i]))
            report.add_trial(digest, _res_str(max(abs(res1), abs(res2))), ok)
    return report


def _is_exact_zero(val):
    if isinstance(val, RadicalElem):
        return val.is_zero()
    return val == 0


def _res_str(val):
    if isinstance(val, (Fraction, int)):
        return str(val)
    if isinstance(val, RadicalElem):
        return repr(val)
    return mpmath.nstr(abs(mpmath.mpc(val)), 8)


# ---------------------------------------------------------------------------
# residue identity suites


def _an_residue_draw(rng, n):
    while True:
        zs = [random_rational(rng, 12) for _ in range(n - 1)]
        zs.append(-sum(zs, Fraction(0)))
        if len(set(zs)) == n:
            return zs


def _an_residue_checks(zs, n):
    lam1 = _monic_from_roots(zs, Fraction(n + 1))
    lam2 = lam1.deriv()
    lam4 = lam2.deriv().deriv()
    checks = []
    total = Fraction(0)
    for i, zi in enumerate(zs):
        lhs = sum(
            (lam2(zi) + lam2(zj)) / ((zi - zj) ** 2 * lam2(zj))
            for j, zj in enumerate(zs)
            if j != i
        )
        num = lam2 + Poly([lam2(zi)])
        den = Poly([-zi, Fraction(1)]) * Poly([-zi, Fraction(1)]) * lam1
        res = residue(num, den, zi)
        rhs = -lam4(zi) / (6 * lam2(zi))
        checks.append(("pole-sum i=%d" % (i + 1),
                       lhs + res, lhs - rhs))
        total += lhs
    checks.append(("infinity", residue_at_infinity(lam4, lam1), total))
    return checks


def _laurent_deriv(num, m):
    """d/dz of num(z)/z^m, returned as (numerator, m + 1)."""
    zpoly = Poly([Fraction(0), Fraction(1)])
    return num.deriv() * zpoly - m * num, m + 1


def _dn_residue_checks(xs, n, shift):
    num = _dn_lambda(xs, n, shift)
    zpoly = Poly([Fraction(0), Fraction(1)])
    n1, m1 = _laurent_deriv(num, 1)   # lambda'   = n1 / z^2
    n2, m2 = _laurent_deriv(n1, m1)   # lambda''  = n2 / z^3
    n3, m3 = _laurent_deriv(n2, m2)   # lambda''' = n3 / z^4
    n4, _ = _laurent_deriv(n3, m3)    # lambda'''' = n4 / z^5

    def lam2(x):
        return n2(x) / x**3

    checks = []
    for i, xi in enumerate(xs):
        l2i = lam2(xi)
        direct = sum(
            (xi + xj) * (xi * l2i + xj * lam2(xj))
            / ((xi - xj) ** 2 * xj * lam2(xj))
            for j, xj in enumerate(xs)
            if j != i
        )
        # f(z) = (z + x_i)(z lam''(z) + x_i lam''(x_i)) / ((z-x_i)^2 z lam'(z))
        fnum = Poly([xi, Fraction(1)]) * (n2 + Poly([Fraction(0)] * 2
                                                    + [xi * l2i]))
        fden = (zpoly * Poly([-xi, Fraction(1)]) * Poly([-xi, Fraction(1)])
                * n1)
        pole_sum = sum(residue(fnum, fden, xj)
                       for j, xj in enumerate(xs) if j != i)
        other = residue(fnum, fden, Fraction(0)) + residue(fnum, fden, xi)
        # the third coefficient is x_i/3, fixing a misprinted factor 3
        printed = (Fraction(1) / xi - (n3(xi) / xi**4) / l2i
                   - xi * (n4(xi) / xi**5) / (3 * l2i))
        checks.append(("pole-sum i=%d" % (i + 1), direct - pole_sum,
                       direct + other))
        checks.append(("printed i=%d" % (i + 1), direct - printed,
                       Fraction(0)))
    # global chain: sum 1/x_i + (res_0 + res_inf)(lam'''/lam' + 3 z lam'''' / lam')
    gnum = n3 + 3 * n4
    gden = zpoly * zpoly * n1
    recip = sum((Fraction(1) / x for x in xs), Fraction(0))
    glob = (recip + residue(gnum, gden, Fraction(0))
            + residue_at_infinity(gnum, gden))
    checks.append(("global", glob, recip))
    return checks


def _e6_g_parts(ts):
    """p, q and the proof's meromorphic function g = gnum/gden."""
    nu = len(ts) // 2
    p = Poly(list(reversed(ts[:nu])))
    q = Poly(list(reversed(ts[nu:])) + [Fraction(0), Fraction(1)])
    pp, qp = p.deriv(), q.deriv()
    big_r = 3 * (qp * qp) + p * (pp * pp)
    r1, r2, r3 = big_r.deriv(), big_r.deriv(2), big_r.deriv(3)
    half = Fraction(3, 2)
    gnum = (half * (pp * qp.deriv(2) + pp.deriv(2) * qp) * r1
            - half * (pp * qp.deriv() + pp.deriv() * qp) * r2
            + qp * r3 * pp)
    gden = pp * pp * big_r
    return p, q, pp, gnum, gden


def _e6_residue_checks(rng):
    while True:
        ts = [random_rational(rng, 9) for _ in range(6)]
        if ts[0] == 0:
            continue
        p, q, pp, gnum, gden = _e6_g_parts(ts)
        y0 = -ts[1] / (2 * ts[0])
        big_r = 3 * (q.deriv() * q.deriv()) + p * (pp * pp)
        if big_r(y0) == 0:
            continue
        break
    at_inf = residue_at_infinity(gnum, gden)
    at_root = residue(gnum, gden, y0)
    want = Fraction(12) / ts[0]
    return [
        ("infinity", at_inf - want, at_inf + at_root),
        ("p-prime root", at_root + want, Fraction(0)),
    ]


def _e8_residue_checks(rng):
    from .radicals import is_square_fraction

    while True:
        ts = [random_rational(rng, 9) for _ in range(8)]
        if ts[0] == 0:
            continue
        disc = 4 * ts[1] ** 2 - 12 * ts[0] * ts[2]
        if disc == 0 or is_square_fraction(disc):
            continue
        p, q, pp, gnum, gden = _e6_g_parts(ts)
        fld = RadicalField([disc])
        root = fld.sqrt_gen(0)
        a1 = (fld.rational(-2 * ts[1]) + root) / (6 * ts[0])
        a2 = (fld.rational(-2 * ts[1]) - root) / (6 * ts[0])
        big_r = 3 * (q.deriv() * q.deriv()) + p * (pp * pp)
        if (fld.rational(1) * big_r(a1)).is_zero():
            continue
        break
    lift = lambda poly: Poly([fld.rational(c) for c in poly.coeffs])
    gnum_f, gden_f = lift(gnum), lift(gden)
    res1 = residue(gnum_f, gden_f, a1)
    res2 = residue(gnum_f, gden_f, a2)
    at_inf = residue_at_infinity(gnum, gden)
    t1, t2, t3 = ts[0], ts[1], ts[2]
    t5, t6 = ts[4], ts[5]
    printed = (fld.rational(8 * (10 * t2 * t3 + 9 * t1 * t2 * t5
                                 - 9 * t1**2 * t6))
               / (9 * t1**3 * (a1 - a2) ** 3))
    return [
        ("root pair", res1 + res2, res1 - printed),
        ("infinity", at_inf, Fraction(0)),
    ]


def residue_identity_suite(spec, seed=DEFAULT_SEED, draws=5):
    """Re-run the printed residue computations on fresh exact parameter
    draws; every check is an exact zero test."""
    report = VerificationReport(
        command="verify-residues", n=spec.n, family=spec.label, seed=seed,
    )
    rng = random.Random("%s|%s|residues" % (seed, spec.label))
    for _ in range(draws):
        if spec.kind == "An":
            zs = _an_residue_draw(rng, spec.n)
            checks = _an_residue_checks(zs, spec.n)
            draw = zs
        elif spec.kind == "Dn":
            while True:
                xs = _dn_xs(rng, spec.n)
                if xs is not None:
                    break
            shift = random_rational(rng, 12)
            checks = _dn_residue_checks(xs, spec.n, shift)
            draw = (xs, shift)
        elif spec.kind == "E6":
            checks = _e6_residue_checks(rng)
            draw = "rational t draw"
        elif spec.kind == "E8":
            checks = _e8_residue_checks(rng)
            draw = "rational t draw"
        else:
            raise ValueError("no residue suite for %r" % spec.kind)
        digest = point_digest((spec.label, draw))
        for name, first, second in checks:
            ok = _is_exact_zero(first) and _is_exact_zero(second)
            report.add_trial(digest + ":" + name,
                             "%s | %s" % (_res_str(first), _res_str(second)),
                             ok)
    return report


# ---------------------------------------------------------------------------
# family-level verification suites


def _family_points(spec, points, seed, precision):
    for k in range(points):
        yield sample(spec, seed=seed + k, precision=precision)


def g2_vanishing_check(spec, points=3, seed=DEFAULT_SEED,
                       precision=DEFAULT_PRECISION):
    """The genus-two correction term evaluates to zero on the family:
    exactly on the exact families, below the relative tolerance on the
    numeric ones."""
    from .genus2 import g2_function

    alg = Algebra(spec.n)
    expr = g2_function(alg)
    report = VerificationReport(
        command="verify-g2", n=spec.n, family=spec.label,
        seed=seed, precision=precision,
    )
    for point in _family_points(spec, points, seed, precision):
        with mpmath.workprec(precision + 64):
            ctx = point.context()
            val = ctx.evaluate(expr)
        if spec.exact:
            ok = _is_exact_zero(val)
        else:
            ok = _residual_ok(val, precision, ctx.stats.max_mag)
        report.add_trial(point.digest(), _res_str(val), ok)
    return report


def relation_family_check(spec, points=3, seed=DEFAULT_SEED,
                          precision=DEFAULT_PRECISION):
    """The sixteen-term graph combination evaluates to zero on family
    points (it equals the second x-derivative of O1 - O2, which is a
    constant on every family)."""
    from .genus2 import relation_expression

    alg = Algebra(spec.n)
    expr = relation_expression(alg)
    report = VerificationReport(
        command="verify-relation", n=spec.n, family=spec.label,
        seed=seed, precision=precision,
    )
    for point in _family_points(spec, points, seed, precision):
        with mpmath.workprec(precision + 64):
            ctx = point.context()
            val = ctx.evaluate(expr)
        if spec.exact:
            ok = _is_exact_zero(val)
        else:
            ok = _residual_ok(val, precision, ctx.stats.max_mag)
        report.add_trial(point.digest(), _res_str(val), ok)
    return report


def o_difference_check(spec, points=3, seed=DEFAULT_SEED,
                       precision=DEFAULT_PRECISION):
    """O1 - O2 evaluated through the graph contractions matches the
    family's closed-form value."""
    from .genus2 import o_difference_graphs

    alg = Algebra(spec.n)
    expr = o_difference_graphs(alg)
    want = closed_form_o_difference(spec)
    report = VerificationReport(
        command="compute-odiff", n=spec.n, family=spec.label,
        seed=seed, precision=precision,
        params={"closed_form": str(want)},
    )
    for point in _family_points(spec, points, seed, precision):
        with mpmath.workprec(precision + 64):
            ctx = point.context()
            val = ctx.evaluate(expr) - want
        if spec.exact:
            ok = _is_exact_zero(val)
        else:
            ok = _residual_ok(val, precision, ctx.stats.max_mag)
        report.add_trial(point.digest(), _res_str(val), ok)
    return report
