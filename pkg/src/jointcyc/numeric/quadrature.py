"""Quadrature on the unit disk for the normalized area measure dA = dx dy / pi.

Integrals of r^s e^{i l theta} v(z) are split into sectors.  Where v is
constant (all of D for a constant weight, the sector over Gamma for an arc
weight) the angular integral is exact and the radial one uses composite
Gauss-Legendre with enough nodes to be exact for polynomials of the needed
degree.  Over the gaps of Gamma the weight is sampled on a tensor grid refined
geometrically toward r = 1 and toward the arc endpoints.  Every rule has
positive weights, so assembled Gram matrices stay positive definite.

The large angular sums are done in fixed point with FLINT integer matrices.
"""
from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from flint import arb, ctx, fmpz_mat

from .weights import ArcSetWeight, ConstantWeight, SeriesWeight, WeightSpec


def digits_to_bits(digits: int) -> int:
    return int(math.ceil(digits * math.log2(10))) + 16


class working_precision:
    """Set FLINT's working precision (bits) inside a ``with`` block.

    FLINT's precision is process-global.  Nested and concurrent blocks are
    reference counted and the saved value is restored when the last one exits;
    concurrent blocks must request the same precision.
    """

    _lock = threading.Lock()
    _depth = 0
    _saved = None
    _local = threading.local()

    def __init__(self, bits: int):
        self.bits = bits

    def __enter__(self):
        cls = working_precision
        stack = cls._local.__dict__.setdefault("stack", [])
        with cls._lock:
            if cls._depth == 0:
                cls._saved = ctx.prec
            cls._depth += 1
            stack.append(self.bits)
            ctx.prec = self.bits
        return self

    def __exit__(self, *exc):
        cls = working_precision
        stack = cls._local.stack
        with cls._lock:
            stack.pop()
            cls._depth -= 1
            if cls._depth == 0:
                ctx.prec = cls._saved
            elif stack:
                ctx.prec = stack[-1]
        return False


@functools.lru_cache(maxsize=64)
def gauss_legendre(q: int, bits: int) -> Tuple[Tuple[arb, ...], Tuple[arb, ...]]:
    """Nodes and weights on [-1, 1]."""
    with working_precision(bits):
        pairs = [arb.legendre_p_root(q, k, weight=True) for k in range(q)]
    return tuple(x for x, _ in pairs), tuple(w for _, w in pairs)


def composite_rule(breaks: Sequence[float], q: int, bits: int):
    xs, ws = gauss_legendre(q, bits)
    nodes, weights = [], []
    with working_precision(bits):
        for a, b in zip(breaks[:-1], breaks[1:]):
            a, b = arb(a), arb(b)
            h, m = (b - a) / 2, (a + b) / 2
            for x, w in zip(xs, ws):
                nodes.append(m + h * x)
                weights.append(h * w)
    return nodes, weights


def radial_breaks(levels: int, hmax: float) -> List[float]:
    """Panels on [0, 1] with breakpoints at 1 - 2^{-j}, j <= levels, width <= hmax."""
    br = [0.0]
    for p in [1 - 2.0 ** -j for j in range(1, levels + 1)] + [1.0]:
        a = br[-1]
        k = max(1, math.ceil((p - a) / hmax - 1e-12))
        br += [a + (p - a) * i / k for i in range(1, k + 1)]
    br[-1] = 1.0
    return br


def gap_breaks(half: float, d0: float, wmax: float) -> List[float]:
    """Panels on [0, half], geometric from d0 near the arc endpoint, then width <= wmax."""
    br = [0.0]
    d = d0
    while br[-1] + d < half and d < wmax:
        br.append(br[-1] + d)
        d *= 2
    while br[-1] < half:
        br.append(min(half, br[-1] + wmax))
    return br


@dataclass(frozen=True)
class QuadratureGrid:
    """Quadrature layout; ``digits`` is the working precision in decimal digits."""

    digits: int = 70
    levels: int = 24
    radial_hmax: float = 1 / 16
    radial_q: int = 20
    angular_q: int = 16
    angular_wmax: float = 0.1

    @property
    def bits(self) -> int:
        return digits_to_bits(self.digits)

    @property
    def angular_d0(self) -> float:
        return 2.0 ** (-self.levels)

    def radial(self, q: int | None = None):
        return _radial_rule(self.levels, self.radial_hmax, q or self.radial_q, self.bits)

    def exact_q(self, degree: int) -> int:
        """Nodes per panel making r^s exact for s <= degree."""
        return max(self.radial_q, degree // 2 + 2)

    def radial_moments(self, smax: int) -> List[arb]:
        """R_s = sum_a w_a r_a^{s+1}, s = 0..smax (exact in exact arithmetic: 1/(s+2))."""
        return _radial_moments(self.levels, self.radial_hmax, self.exact_q(smax + 1), self.bits, smax)

    def exactness_error(self, kmax: int) -> float:
        """Max relative error of the radial rule on r^{2k+1}, k <= kmax."""
        R = self.radial_moments(2 * kmax)
        with working_precision(self.bits):
            errs = [abs(R[2 * k] * (2 * k + 2) - 1) for k in range(kmax + 1)]
            top = max(errs, key=lambda e: float(e.mid()))
            return float(top.mid()) + float(top.rad())

    def effective_digits(self, kmax: int) -> float:
        err = self.exactness_error(kmax)
        return float(self.digits) if err == 0 else -math.log10(err)

    def to_json(self):
        return {"digits": self.digits, "levels": self.levels, "radial_hmax": self.radial_hmax,
                "radial_q": self.radial_q, "angular_q": self.angular_q,
                "angular_wmax": self.angular_wmax}


@functools.lru_cache(maxsize=32)
def _radial_rule(levels, hmax, q, bits):
    return composite_rule(radial_breaks(levels, hmax), q, bits)


@functools.lru_cache(maxsize=32)
def _radial_moments(levels, hmax, q, bits, smax):
    nodes, weights = _radial_rule(levels, hmax, q, bits)
    with working_precision(bits):
        out = []
        cur = [w * r for w, r in zip(weights, nodes)]
        for s in range(smax + 1):
            out.append(sum(cur, arb(0)))
            cur = [c * r for c, r in zip(cur, nodes)]
    return tuple(out)


def _fixed(x: arb, P: int) -> int:
    """floor(x * 2^P) for an arb midpoint."""
    m, e = x.mid().man_exp()
    e = int(e) + P
    m = int(m)
    return m << e if e >= 0 else m >> (-e)


# ---------------------------------------------------------------------------
# moments mu(s, l) = (1/pi) int_D r^s e^{i l theta} v dA-density, i.e.
# (1/pi) int_0^1 int_0^{2 pi} r^{s+1} e^{i l theta} v(r e^{i theta}) dtheta dr


def moment_table(weight: WeightSpec, smax: int, lmax: int, grid: QuadratureGrid):
    """Real and imaginary parts of mu(s, l) for 0 <= s <= smax, 0 <= l <= lmax."""
    return _moment_table(weight, smax, lmax, grid)


@functools.lru_cache(maxsize=16)
def _moment_table(weight, smax, lmax, grid):
    bits = grid.bits
    if isinstance(weight, SeriesWeight):
        re = [[arb(0)] * (lmax + 1) for _ in range(smax + 1)]
        im = [[arb(0)] * (lmax + 1) for _ in range(smax + 1)]
        with working_precision(bits):
            for a, comp in zip(weight.coefficients, weight.components):
                cr, ci = _moment_table(comp, smax, lmax, grid)
                for s in range(smax + 1):
                    for l in range(lmax + 1):
                        re[s][l] += arb(a) * cr[s][l]
                        im[s][l] += arb(a) * ci[s][l]
        return re, im
    R = grid.radial_moments(smax)
    with working_precision(bits):
        pi = arb.pi()
        if isinstance(weight, ConstantWeight):
            c = arb(weight.c)
            re = [[2 * c * R[s] if l == 0 else arb(0) for l in range(lmax + 1)] for s in range(smax + 1)]
            im = [[arb(0)] * (lmax + 1) for _ in range(smax + 1)]
            return re, im
        if not isinstance(weight, ArcSetWeight):
            raise TypeError(f"unsupported weight {weight!r}")
        arcs, gaps = weight.pieces()
        # exact angular integrals over Gamma
        arc_re, arc_im = [], []
        for l in range(lmax + 1):
            xr, xi = arb(0), arb(0)
            for s0, e0 in arcs:
                a, b = arb(s0), arb(e0)
                if l == 0:
                    xr += b - a
                else:
                    xr += ((l * b).sin() - (l * a).sin()) / l
                    xi += ((l * a).cos() - (l * b).cos()) / l
            arc_re.append(xr)
            arc_im.append(xi)
        re = [[R[s] * arc_re[l] / pi for l in range(lmax + 1)] for s in range(smax + 1)]
        im = [[R[s] * arc_im[l] / pi for l in range(lmax + 1)] for s in range(smax + 1)]
    if gaps:
        gr, gi = _gap_moments(gaps, smax, lmax, grid)
        with working_precision(bits):
            for s in range(smax + 1):
                for l in range(lmax + 1):
                    re[s][l] += gr[s][l]
                    im[s][l] += gi[s][l]
    return re, im


def _gap_moments(gaps, smax, lmax, grid: QuadratureGrid):
    bits = grid.bits
    P = bits + 32
    rnodes, rweights = grid.radial()
    with working_precision(bits + 32):
        thetas, tweights, dists = [], [], []
        for e1, e2 in gaps:
            half = (e2 - e1) / 2
            dn, dw = composite_rule(gap_breaks(half, grid.angular_d0, grid.angular_wmax), grid.angular_q, bits + 32)
            for d, w in zip(dn, dw):
                chord = 2 * (d / 2).sin()
                for th in (arb(e1) + d, arb(e2) - d):
                    thetas.append(th)
                    tweights.append(w)
                    dists.append(chord)
        A, Rn, L, S = len(thetas), len(rnodes), lmax + 1, smax + 1
        inv = [1 / (1 - r) for r in rnodes]
        invf = [float(x.mid()) for x in inv]
        distf = [float(x.mid()) for x in dists]
        cut = (P + 8) * math.log(2)
        W = [0] * (A * Rn)
        for b in range(A):
            row = b * Rn
            for a in range(Rn):
                if distf[b] * invf[a] < cut:
                    W[row + a] = _fixed((-(dists[b] * inv[a])).exp(), P)
        Wm = fmpz_mat(A, Rn, W)
        ec = [0] * (L * A)
        es = [0] * (L * A)
        for b in range(A):
            th, w = thetas[b], tweights[b]
            for l in range(L):
                lt = l * th
                ec[l * A + b] = _fixed(w * lt.cos(), P)
                es[l * A + b] = _fixed(w * lt.sin(), P)
        Vc = fmpz_mat(L, A, ec) * Wm
        Vs = fmpz_mat(L, A, es) * Wm
        pi = arb.pi()
        rp = [0] * (S * Rn)
        for a in range(Rn):
            p = rweights[a] * rnodes[a] / pi
            for s in range(S):
                rp[s * Rn + a] = _fixed(p, P)
                p = p * rnodes[a]
        Rp = fmpz_mat(S, Rn, rp)
        Mc = Rp * Vc.transpose()
        Ms = Rp * Vs.transpose()
        scale = arb(2) ** (-3 * P)
    with working_precision(bits):
        re = [[arb(Mc[s, l]) * scale for l in range(L)] for s in range(S)]
        im = [[arb(Ms[s, l]) * scale for l in range(L)] for s in range(S)]
    return re, im
