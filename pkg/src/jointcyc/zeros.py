"""Zero location of polynomials on open and closed polydisks.

One and two variables are decided exactly (up to certified root inclusion);
more variables use sufficient tests plus an exact slice search.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .ideal import IllConditioned, buchberger, solve_variety
from .poly import (GaussianRational, MultiPolynomial, ONE_Q, content, derivative, divide_exact,
                   evaluate, gcd, squarefree_part)
from .univariate import approximate_roots, disk_zero_test, to_univariate

TORUS_MARGIN = 1e-6
EVENT_MERGE = 1e-9


@dataclass(frozen=True)
class ZeroReport:
    status: str  # "zero", "zero_free" or "uncertain"
    witness: Optional[Tuple[complex, ...]] = None
    reason: str = ""
    on_boundary: bool = False

    @property
    def has_zero(self) -> bool:
        return self.status == "zero"


def _lift(rep: ZeroReport, dim: int, positions: Sequence[int]) -> ZeroReport:
    if rep.witness is None:
        return rep
    full = [0j] * dim
    for k, j in zip(positions, rep.witness):
        full[k - 1] = complex(j)
    return ZeroReport(rep.status, tuple(full), rep.reason, rep.on_boundary)


def dominant_constant(P: MultiPolynomial, strict: bool) -> bool:
    """|c_0| > sum of the other |c_a| (or >= when ``strict`` is False)."""
    c0 = P.constant_term()
    if c0.is_zero():
        return False
    with mpmath.workdps(40):
        rest = mpmath.fsum(mpmath.sqrt(c.abs2()) for e, c in P.items() if sum(e) > 0)
        diff = mpmath.sqrt(c0.abs2()) - rest
        if diff > mpmath.mpf(10) ** -30:
            return True
        if diff < -mpmath.mpf(10) ** -30:
            return False
    # too close to call in floating point: only decidable exactly for a single other term
    others = [c for e, c in P.items() if sum(e) > 0]
    if len(others) == 1:
        a, b = c0.abs2(), others[0].abs2()
        return a > b if strict else a >= b
    return False


def polydisk_zero(P: MultiPolynomial, closed: bool) -> ZeroReport:
    """Decide whether P vanishes somewhere on the open (or closed) unit polydisk."""
    d = P.dim
    if P.is_zero():
        return ZeroReport("zero", (0j,) * d, "zero polynomial")
    if P.is_constant():
        return ZeroReport("zero_free", None, "nonzero constant")
    if dominant_constant(P, strict=closed):
        return ZeroReport("zero_free", None, "constant term dominates")
    vs = sorted(P.variables())
    R = P.restrict(vs)
    if len(vs) == 1:
        r = disk_zero_test(to_univariate(R), closed)
        rep = ZeroReport(r.status, None if r.witness is None else (r.witness,), r.reason,
                         r.witness is not None and abs(abs(r.witness) - 1) < 1e-12)
    elif len(vs) == 2:
        rep = _bidisk(R, closed)
    else:
        rep = _general(R, closed)
    return _lift(rep, d, vs)


# ---------------------------------------------------------------------------
# two variables


def _combine(reports: Sequence[ZeroReport]) -> ZeroReport:
    for r in reports:
        if r.status == "zero":
            return r
    for r in reports:
        if r.status == "uncertain":
            return r
    return ZeroReport("zero_free", None, "; ".join(r.reason for r in reports if r.reason))


def split_contents(P: MultiPolynomial):
    """P = c1(z1) * c2(z2) * P' for a polynomial in exactly two variables."""
    c1 = content(P, 2)  # coefficients in z2 are polynomials in z1
    c2 = content(P, 1)
    rest = divide_exact(divide_exact(P, c1), c2)
    return c1, c2, rest


def _bidisk(P: MultiPolynomial, closed: bool) -> ZeroReport:
    c1, c2, rest = split_contents(P)
    reports = []
    for j, c in ((1, c1), (2, c2)):
        if c.is_constant():
            continue
        r = disk_zero_test(to_univariate(c), closed)
        w = None
        if r.witness is not None:
            w = (r.witness, 0j) if j == 1 else (0j, r.witness)
        reports.append(ZeroReport(r.status, w, f"factor in z{j}: {r.reason}"))
        if r.status == "zero":
            return reports[-1]
    if not rest.is_constant():
        reports.append(_bidisk_closed(rest) if closed else _bidisk_open(rest))
    return _combine(reports)


def reflect2(P: MultiPolynomial) -> MultiPolynomial:
    return P.reflect()


def unit_point(theta: float, max_den: int = 10**8) -> GaussianRational:
    """Exact point of Q(i) on the unit circle at angle close to ``theta``."""
    k = round(theta / (math.pi / 2))
    phi = theta - k * math.pi / 2
    t = Fraction(math.tan(phi / 2)).limit_denominator(max_den)
    base = GaussianRational((1 - t * t) / (1 + t * t), 2 * t / (1 + t * t))
    return base * (GaussianRational(0, 1) ** (k % 4))


def _slice_root_inside(P: MultiPolynomial, zeta: complex) -> Optional[Tuple[complex, complex]]:
    """Hurwitz push: a zero (a, rho*zeta) with |a| < 1, rho < 1 near a boundary zero."""
    for rho in (1 - 1e-3, 1 - 1e-5, 1 - 1e-7):
        w2 = rho * zeta
        sl = P.coefficients_in(1)
        cs = [complex(evaluate(sl.get(k, MultiPolynomial.zero(2)), [0, w2])) for k in range(max(sl) + 1)]
        if all(c == 0 for c in cs[1:]):
            continue
        roots = np.roots(list(reversed(cs)))
        for r in sorted(roots, key=abs):
            if abs(r) < 1 - 1e-12 and abs(complex(evaluate(P, [complex(r), w2]))) < 1e-8:
                return (complex(r), w2)
    return None


def _torus_points(A: MultiPolynomial, B: MultiPolynomial):
    """Points of V(A, B) within TORUS_MARGIN of the torus, or None on failure."""
    try:
        sol = solve_variety(buchberger([A, B]))
    except IllConditioned:
        return None
    return [p for p in sol.points
            if all(abs(abs(z) - 1) < TORUS_MARGIN for z in p.coordinates)]


def _bidisk_closed(P: MultiPolynomial) -> ZeroReport:
    h = gcd(P, reflect2(P))
    if not h.is_constant():
        for theta in (0.0, 1.0, 2.0, 3.0):
            zeta = complex(unit_point(theta))
            sl = h.substitute(2, unit_point(theta))
            if sl.is_constant():
                continue
            roots = approximate_roots(to_univariate(sl))
            best = min(roots, key=abs)
            if abs(best) <= 1 + 1e-9:
                return ZeroReport("zero", (best, zeta), "self-reflective factor vanishes on the closed bidisk", True)
        return ZeroReport("zero", None, "self-reflective factor vanishes on the closed bidisk", True)
    r = disk_zero_test(to_univariate(P.substitute(1, 0)), closed=True)
    if r.status != "zero_free":
        return ZeroReport(r.status, None if r.witness is None else (0j, r.witness), f"slice z1=0: {r.reason}")
    pts = _torus_points(P, reflect2(P))
    if pts is None:
        return ZeroReport("uncertain", None, "torus intersection ill-conditioned")
    for p in pts:
        if p.exact is not None and all(c.abs2() == 1 for c in p.exact):
            return ZeroReport("zero", p.coordinates, "exact zero on the torus", True)
    if pts:
        return ZeroReport("uncertain", pts[0].coordinates, "numerical zero too close to the torus")
    sl = P.substitute(2, 1)
    r = disk_zero_test(to_univariate(sl), closed=True)
    if r.status != "zero_free":
        return ZeroReport(r.status, None if r.witness is None else (r.witness, 1 + 0j), f"slice z2=1: {r.reason}")
    return ZeroReport("zero_free", None, "no zeros on the closed bidisk")


def _event_angles(P: MultiPolynomial) -> Optional[List[float]]:
    """Angles on the circle where the number of slice roots in the disk may change."""
    h = gcd(P, reflect2(P))
    zs: List[complex] = []
    q = P
    if not h.is_constant():
        hs = squarefree_part(h)
        while True:
            g = gcd(q, hs)
            if g.is_constant():
                break
            q = divide_exact(q, g)
        dh = derivative(hs, 1)
        if not dh.is_constant():
            pts = _torus_points(hs, dh)
            if pts is None:
                return None
            zs += [p.coordinates[1] for p in pts]
    if not q.is_constant() and q.variables() == frozenset({1, 2}):
        pts = _torus_points(q, reflect2(q))
        if pts is None:
            return None
        zs += [p.coordinates[1] for p in pts]
    cs = P.coefficients_in(1)
    lc = cs[max(cs)]
    if not lc.is_constant():
        zs += [r for r in approximate_roots(to_univariate(lc)) if abs(abs(r) - 1) < TORUS_MARGIN]
    angles = sorted(math.atan2(z.imag, z.real) for z in zs)
    merged: List[float] = []
    for a in angles:
        if not merged or a - merged[-1] > EVENT_MERGE:
            merged.append(a)
    if len(merged) > 1 and merged[0] + 2 * math.pi - merged[-1] <= EVENT_MERGE:
        merged.pop()
    return merged


def _bidisk_open(P: MultiPolynomial) -> ZeroReport:
    r = disk_zero_test(to_univariate(P.substitute(1, 0)), closed=False)
    if r.status != "zero_free":
        return ZeroReport(r.status, None if r.witness is None else (0j, r.witness), f"slice z1=0: {r.reason}")
    events = _event_angles(P)
    if events is None:
        return ZeroReport("uncertain", None, "boundary event computation ill-conditioned")
    if not events:
        samples = [0.0]
    else:
        samples = []
        for a, b in zip(events, events[1:] + [events[0] + 2 * math.pi]):
            samples.append((a + b) / 2)
    for theta in samples:
        zeta = unit_point(theta)
        r = disk_zero_test(to_univariate(P.substitute(2, zeta)), closed=False)
        if r.status == "uncertain":
            return ZeroReport("uncertain", None, f"slice z2 on the circle: {r.reason}")
        if r.status == "zero":
            w = _slice_root_inside(P, complex(zeta))
            if w is None:
                return ZeroReport("zero", (r.witness, complex(zeta)), "zero on the distinguished boundary slice", True)
            return ZeroReport("zero", w, "zero inside the bidisk near a boundary slice")
    return ZeroReport("zero_free", None, "no zeros on the open bidisk")


# ---------------------------------------------------------------------------
# three or more variables

_SLICE_VALUES = (Fraction(0), Fraction(1, 2), Fraction(-1, 2), GaussianRational(0, Fraction(1, 2)),
                 GaussianRational(0, Fraction(-1, 2)), Fraction(9, 10), Fraction(-9, 10),
                 GaussianRational(0, Fraction(9, 10)), GaussianRational(0, Fraction(-9, 10)))
_BOUNDARY_VALUES = (Fraction(1), Fraction(-1), GaussianRational(0, 1), GaussianRational(0, -1))


def _general(P: MultiPolynomial, closed: bool, max_slices: int = 400) -> ZeroReport:
    d = P.dim
    values = list(_SLICE_VALUES) + (list(_BOUNDARY_VALUES) if closed else [])
    # one-variable contents are decided exactly
    for j in range(1, d + 1):
        others = [k for k in range(1, d + 1) if k != j]
        c = MultiPolynomial.zero(d)
        for coef in _coefficients_excluding(P, j).values():
            c = gcd(c, coef) if not c.is_zero() else coef
            if c.is_constant():
                break
        if not c.is_constant():
            r = disk_zero_test(to_univariate(c), closed)
            if r.status == "zero":
                w = [0j] * d
                w[j - 1] = r.witness
                return ZeroReport("zero", tuple(w), f"factor in z{j}: {r.reason}")
    count = 0
    for fixed in itertools.product(values, repeat=d - 2):
        count += 1
        if count > max_slices:
            break
        S = P
        for k, v in enumerate(fixed):
            S = S.substitute(k + 1, v)
        if S.is_zero():
            return ZeroReport("zero", tuple(complex(GaussianRational.coerce(v)) for v in fixed) + (0j, 0j),
                              "slice vanishes identically")
        rep = polydisk_zero(S, closed)
        if rep.status == "zero":
            w = tuple(complex(GaussianRational.coerce(v)) for v in fixed) + rep.witness[d - 2:]
            return ZeroReport("zero", w, "zero found on an exact slice", rep.on_boundary)
    return ZeroReport("uncertain", None, f"no zero found on {min(count, max_slices)} slices; "
                                         "zero-freeness in three or more variables is not certified")


def _coefficients_excluding(P: MultiPolynomial, j: int):
    """Coefficients of P as a polynomial in all variables except z_j."""
    groups = {}
    for e, c in P.items():
        key = e[: j - 1] + (0,) + e[j:]
        e2 = tuple(x if i == j - 1 else 0 for i, x in enumerate(e))
        groups.setdefault(key, {})[e2] = c
    return {k: MultiPolynomial(P.dim, t) for k, t in groups.items()}
