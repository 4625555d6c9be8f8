"""Exact and certified root location for one-variable polynomials over Q(i).

The unit-circle questions are answered exactly: unimodular roots are counted
through the Cayley map z = (1 + i x)/(1 - i x) and a Sturm sequence over Q.
Roots away from the circle are located with mpmath and certified by
Weierstrass-correction inclusion disks, raising the working precision until
every disk sits strictly on one side of the circle.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import mpmath

from .poly import (GaussianRational, MultiPolynomial, ONE_Q, ZERO_Q, I_Q, divide_exact,
                   gcd, squarefree_part)

PRECISION_LADDER = (30, 60, 120, 240)


def to_univariate(P: MultiPolynomial) -> MultiPolynomial:
    """View a polynomial that involves at most one variable as a dim-1 polynomial."""
    vs = P.variables()
    if len(vs) > 1:
        raise ValueError("polynomial involves more than one variable")
    if P.dim == 1:
        return P
    j = next(iter(vs)) if vs else 1
    return MultiPolynomial(1, {(e[j - 1],): c for e, c in P.items()})


def coefficients(p: MultiPolynomial) -> List[GaussianRational]:
    """Dense ascending coefficients of a dim-1 polynomial."""
    return p.univariate_coefficients()


def from_coefficients(cs: Sequence) -> MultiPolynomial:
    return MultiPolynomial(1, {(k,): c for k, c in enumerate(cs)})


def reflection(p: MultiPolynomial) -> MultiPolynomial:
    """p*(z) = z^n conj(p(1/conj z)), n = deg p."""
    return p.reflect()


def self_inversive_part(p: MultiPolynomial) -> MultiPolynomial:
    """gcd(p, p*): carries every unimodular root and the pairs (r, 1/conj r)."""
    return gcd(p, reflection(p))


# ---------------------------------------------------------------------------
# dense rational polynomials and Sturm sequences


def _trim(a: List[Fraction]) -> List[Fraction]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _rem(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and a:
        c = a[-1] / lb
        s = len(a) - 1 - db
        for k in range(db + 1):
            a[s + k] -= c * b[k]
        _trim(a)
    return a


def _qgcd(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _rem(a, b)
    if not a:
        return a
    return [c / a[-1] for c in a]


def _deriv(a: List[Fraction]) -> List[Fraction]:
    return [k * a[k] for k in range(1, len(a))]


def _sign_changes(vals: Sequence[Fraction]) -> int:
    signs = [v > 0 for v in vals if v != 0]
    return sum(1 for x, y in zip(signs, signs[1:]) if x != y)


def real_root_count(a: Sequence[Fraction]) -> int:
    """Number of distinct real roots of a nonzero rational polynomial."""
    a = _trim([Fraction(x) for x in a])
    if len(a) <= 1:
        return 0
    g = _qgcd(a, _deriv(a))
    if len(g) > 1:
        # squarefree part a / g by long division
        q, r = [Fraction(0)] * (len(a) - len(g) + 1), list(a)
        for k in range(len(q) - 1, -1, -1):
            q[k] = r[k + len(g) - 1] / g[-1]
            for m in range(len(g)):
                r[k + m] -= q[k] * g[m]
        a = q
    chain = [a, _deriv(a)]
    while len(chain[-1]) > 1:
        r = _rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    at_pos = [p[-1] for p in chain]
    at_neg = [p[-1] * (-1) ** (len(p) - 1) for p in chain]
    return _sign_changes(at_neg) - _sign_changes(at_pos)


def _mul_dense(a, b):
    out = [ZERO_Q] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def unimodular_root_count(p: MultiPolynomial) -> int:
    """Exact number of distinct roots of p on the unit circle."""
    p = to_univariate(p)
    if p.is_zero():
        raise ValueError("zero polynomial")
    if p.is_constant():
        return 0
    p = squarefree_part(p)
    cs = coefficients(p)
    n = len(cs) - 1
    plus, minus = [ONE_Q, I_Q], [ONE_Q, -I_Q]
    # R(x) = sum_k a_k (1 + i x)^k (1 - i x)^(n - k)
    pp = [[ONE_Q]]
    pm = [[ONE_Q]]
    for _ in range(n):
        pp.append(_mul_dense(pp[-1], plus))
        pm.append(_mul_dense(pm[-1], minus))
    R = [ZERO_Q] * (n + 1)
    for k, a in enumerate(cs):
        if a.is_zero():
            continue
        term = _mul_dense(pp[k], pm[n - k])
        for m, c in enumerate(term):
            R[m] = R[m] + a * c
    re_part = [c.re for c in R]
    im_part = [c.im for c in R]
    common = _qgcd(re_part, im_part) if any(im_part) else _trim(list(re_part))
    count = real_root_count(common) if len(common) > 1 else 0
    minus_one = sum((c * (-1) ** k for k, c in enumerate(cs)), ZERO_Q)
    return count + (1 if minus_one.is_zero() else 0)


# ---------------------------------------------------------------------------
# certified numerical roots


@dataclass(frozen=True)
class RootDisk:
    center: complex
    radius: float
    side: str  # "inside", "outside" or "unknown" relative to the unit circle


def _mp_coeffs(cs):
    return [c.to_mpc() for c in cs]


def _inclusion_disks(cs, dps):
    """Roots of a squarefree polynomial with rigorous-ish inclusion radii, or None."""
    n = len(cs) - 1
    with mpmath.workdps(dps):
        mc = _mp_coeffs(cs)
        try:
            roots = mpmath.polyroots(list(reversed(mc)), maxsteps=200 + 10 * n, extraprec=2 * dps)
        except mpmath.libmp.libhyper.NoConvergence:
            return None
        roots = list(roots) if n > 1 else [roots[0]] if isinstance(roots, list) else [roots]
        disks = []
        eps = mpmath.mpf(10) ** (-dps + 5)
        for k, r in enumerate(roots):
            val = mpmath.polyval(list(reversed(mc)), r)
            scale = sum(abs(c) * abs(r) ** m for m, c in enumerate(mc))
            den = mc[-1]
            for j, s in enumerate(roots):
                if j != k:
                    den *= (r - s)
            if den == 0:
                return None
            rad = n * (abs(val) + eps * scale) / abs(den)
            disks.append((r, rad))
        for k in range(n):
            for j in range(k + 1, n):
                if abs(disks[k][0] - disks[j][0]) <= disks[k][1] + disks[j][1]:
                    return None
        return disks


def certified_roots(p: MultiPolynomial) -> Optional[List[RootDisk]]:
    """Inclusion disks for the distinct roots of p, classified against |z| = 1.

    Each disk contains exactly one root.  Returns None if the precision ladder
    is exhausted without a clean separation.
    """
    p = squarefree_part(to_univariate(p))
    cs = coefficients(p)
    if len(cs) <= 1:
        return []
    last = None
    for dps in PRECISION_LADDER:
        disks = _inclusion_disks(cs, dps)
        if disks is None:
            continue
        with mpmath.workdps(dps):
            out = []
            for r, rad in disks:
                a = abs(r)
                side = "inside" if a + rad < 1 else "outside" if a - rad > 1 else "unknown"
                out.append(RootDisk(complex(r), float(rad), side))
        last = out
        if all(d.side != "unknown" for d in out):
            return out
    return last


def approximate_roots(p: MultiPolynomial, dps: int = 30) -> List[complex]:
    p = to_univariate(p)
    cs = coefficients(p)
    if len(cs) <= 1:
        return []
    with mpmath.workdps(dps):
        try:
            rs = mpmath.polyroots([c.to_mpc() for c in reversed(cs)], maxsteps=400, extraprec=3 * dps)
        except mpmath.libmp.libhyper.NoConvergence:
            import numpy as np
            return [complex(r) for r in np.roots([complex(c) for c in reversed(cs)])]
    rs = rs if isinstance(rs, list) else [rs]
    return [complex(r) for r in rs]


# ---------------------------------------------------------------------------
# disk decisions


@dataclass(frozen=True)
class DiskZeroResult:
    status: str  # "zero", "zero_free" or "uncertain"
    witness: Optional[complex] = None
    reason: str = ""


def disk_zero_test(p: MultiPolynomial, closed: bool) -> DiskZeroResult:
    """Does p have a root in the open (closed) unit disk?

    Split p = G * H with G = gcd(p, p*).  H has no roots on the circle and is
    handled by certified disks; G's roots are unimodular or come in pairs
    (r, 1/conj r), so G has a root in the open disk iff not all of its
    distinct roots are unimodular (an exact count).
    """
    p = to_univariate(p)
    if p.is_zero():
        return DiskZeroResult("zero", 0j, "zero polynomial")
    if p.is_constant():
        return DiskZeroResult("zero_free", None, "nonzero constant")
    G = self_inversive_part(p)
    H = divide_exact(p, G)
    if not H.is_constant():
        disks = certified_roots(H)
        if disks is None or any(d.side == "unknown" for d in disks):
            return DiskZeroResult("uncertain", None, "root too close to the unit circle")
        inside = [d for d in disks if d.side == "inside"]
        if inside:
            return DiskZeroResult("zero", inside[0].center, "certified root inside the disk")
    if not G.is_constant():
        Gs = squarefree_part(G)
        deg = Gs.degree_in(1)
        unimodular = unimodular_root_count(Gs)
        roots = sorted(approximate_roots(Gs), key=abs)
        if unimodular < deg:
            return DiskZeroResult("zero", roots[0], "self-inversive factor with a root pair off the circle")
        if closed:
            w = min(roots, key=lambda r: abs(abs(r) - 1))
            return DiskZeroResult("zero", w / abs(w), "root on the unit circle")
    return DiskZeroResult("zero_free", None, "no roots in the disk")
