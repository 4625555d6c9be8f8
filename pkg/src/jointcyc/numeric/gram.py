"""Gram matrices of monomials in H_(v,n) and the quantities derived from them.

Inner product: <f, g> = sum_{m<=n} int_D f^(m) conj(g^(m)) v dA, so
G[j][k] = <z^j, z^k>.  Polynomials are coefficient vectors u (u[i] multiplies
z^i) and <u, u'> = u'^H conj(G) u.

Orthonormalization is modified Gram-Schmidt with two sweeps, carried out on
ball midpoints (the radii of interval arithmetic grow uselessly fast here).
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from flint import acb, arb

from .quadrature import QuadratureGrid, moment_table, working_precision
from .weights import WeightSpec


class PrecisionLoss(ArithmeticError):
    """The condition estimate exhausts the working precision."""


class IllConditioned(ArithmeticError):
    """A value was computed but its conditioning is too poor to trust it."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


@dataclass(frozen=True)
class WeightedSpace:
    """H_(v,n) on the unit disk."""

    weight: WeightSpec
    n: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("derivative order must be nonnegative")


def _falling(j: int, m: int) -> int:
    out = 1
    for i in range(m):
        out *= j - i
    return out


@dataclass
class GramMatrix:
    N: int
    n: int
    entries: List[List[acb]]
    digits: int
    hermitian: bool = True
    phis: List[List[acb]] = field(default_factory=list, repr=False)
    gphis: List[List[acb]] = field(default_factory=list, repr=False)
    pivots: List[float] = field(default_factory=list, repr=False)

    @property
    def bits(self) -> int:
        return QuadratureGrid(digits=self.digits).bits

    def diagonal(self) -> List[float]:
        return [float(self.entries[k][k].real.mid()) for k in range(self.N + 1)]

    def condition_estimate(self, N: Optional[int] = None) -> float:
        """max_k G[k][k] / min_k pivot_k over k <= N (MGS pivots are squared residual norms)."""
        N = self.N if N is None else N
        diag = self.diagonal()[: N + 1]
        piv = self.pivots[: N + 1]
        lo = min(piv)
        return math.inf if lo <= 0 else max(diag) / lo

    def ill_conditioned(self, N: Optional[int] = None) -> bool:
        return self.condition_estimate(N) > 10.0 ** (self.digits - 12)

    def to_json(self):
        return {
            "N": self.N, "n": self.n, "digits": self.digits, "hermitian": self.hermitian,
            "condition_estimate": self.condition_estimate(),
            "entries": [[[float(x.real.mid()), float(x.imag.mid())] for x in row] for row in self.entries],
        }


def gram_matrix(space: WeightedSpace, N: int, grid: QuadratureGrid = QuadratureGrid()) -> GramMatrix:
    """Gram matrix of 1, z, ..., z^N in H_(v,n), orthonormalized on construction."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    return _gram(space.weight, space.n, N, grid)


@functools.lru_cache(maxsize=16)
def _gram(weight, n, N, grid) -> GramMatrix:
    re, im = moment_table(weight, 2 * N, N, grid)
    with working_precision(grid.bits):
        G = [[acb(0)] * (N + 1) for _ in range(N + 1)]
        for j in range(N + 1):
            for k in range(j + 1):
                s, l = j + k, j - k
                tr, ti = arb(0), arb(0)
                for m in range(min(n, k) + 1):
                    c = _falling(j, m) * _falling(k, m)
                    tr += c * re[s - 2 * m][l]
                    ti += c * im[s - 2 * m][l]
                G[j][k] = acb(tr, ti)
                G[k][j] = acb(tr, -ti)
    gm = GramMatrix(N, n, G, grid.digits)
    _orthonormalize(gm, grid.bits)
    if gm.condition_estimate() > 10.0 ** (grid.digits - 4):
        raise PrecisionLoss(f"condition estimate {gm.condition_estimate():.3g} exceeds "
                            f"the {grid.digits}-digit budget")
    return gm


def _orthonormalize(gm: GramMatrix, bits: int) -> None:
    G = gm.entries
    L = gm.N + 1
    phis, gphis, piv = [], [], []
    with working_precision(bits):
        for k in range(L):
            u = [acb(0)] * L
            u[k] = acb(1)
            gu = [G[k][i] for i in range(L)]  # conj(G) e_k
            for _sweep in range(2):
                for j in range(k):
                    pj, gj = phis[j], gphis[j]
                    c = acb(0)
                    for i in range(j + 1):
                        c += pj[i].conjugate() * gu[i]
                    c = c.mid()
                    for i in range(j + 1):
                        u[i] = (u[i] - c * pj[i]).mid()
                    for i in range(L):
                        gu[i] = (gu[i] - c * gj[i]).mid()
            nrm2 = acb(0)
            for i in range(k + 1):
                nrm2 += u[i].conjugate() * gu[i]
            nrm2 = nrm2.real.mid()
            piv.append(float(nrm2))
            if not nrm2 > 0:
                raise PrecisionLoss(f"Gram matrix not numerically positive definite at k = {k}")
            sc = (1 / nrm2.sqrt()).mid()
            phis.append([(x * sc).mid() for x in u])
            gphis.append([(x * sc).mid() for x in gu])
    gm.phis, gm.gphis, gm.pivots = phis, gphis, piv


def inner(gm: GramMatrix, u: Sequence[acb], v: Sequence[acb]) -> acb:
    """<u, v> for coefficient vectors of length <= N+1."""
    G = gm.entries
    with working_precision(gm.bits):
        tot = acb(0)
        for j, uj in enumerate(u):
            if uj == 0:
                continue
            for k, vk in enumerate(v):
                if vk != 0:
                    tot += uj * vk.conjugate() * G[j][k]
    return tot


def _eval(coeffs: Sequence[acb], w: acb) -> acb:
    val = acb(0)
    for c in reversed(coeffs):
        val = val * w + c
    return val


def lambda_profile(gm: GramMatrix, w: complex) -> List[float]:
    """[lambda_0(w), ..., lambda_N(w)] as prefix sums of |phi_k(w)|^2."""
    out = []
    with working_precision(gm.bits):
        wa = acb(complex(w).real, complex(w).imag)
        tot = arb(0)
        for ph in gm.phis:
            tot += abs(_eval(ph, wa)) ** 2
            out.append(float(tot.mid()))
    return out


def lambda_N(gm: GramMatrix, w: complex, N: Optional[int] = None, strict: bool = True) -> float:
    """sup{|P(w)|^2 : ||P|| <= 1, deg P <= N}; raises IllConditioned (carrying the
    value) when the Gram data is too poorly conditioned and ``strict`` is set."""
    N = gm.N if N is None else N
    if not 0 <= N <= gm.N:
        raise ValueError(f"N must lie in [0, {gm.N}]")
    val = lambda_profile(gm, w)[N]
    if strict and gm.ill_conditioned(N):
        raise IllConditioned(f"condition estimate {gm.condition_estimate(N):.3g}", val)
    return val


def delta_profile(gm: GramMatrix, w: complex) -> List[float]:
    """[delta_1(w), ..., delta_N(w)] with delta_N = min_{deg q <= N-1} ||1 - (z - w) q||."""
    G = gm.entries
    L = gm.N + 1
    out = []
    with working_precision(gm.bits):
        wa = acb(complex(w).real, complex(w).imag)
        # residual r = 1 - projection, tracked with its image conj(G) r
        r = [acb(0)] * L
        r[0] = acb(1)
        gr = [G[0][i] for i in range(L)]
        psis, gpsis = [], []
        for j in range(L - 1):
            u = [acb(0)] * L
            u[j], u[j + 1] = -wa, acb(1)
            gu = [(G[j + 1][i] - wa * G[j][i]).mid() for i in range(L)]
            for _sweep in range(2):
                for p, gp in zip(psis, gpsis):
                    c = acb(0)
                    for i in range(L):
                        c += p[i].conjugate() * gu[i]
                    c = c.mid()
                    u = [(a - c * b).mid() for a, b in zip(u, p)]
                    gu = [(a - c * b).mid() for a, b in zip(gu, gp)]
            nrm2 = acb(0)
            for i in range(L):
                nrm2 += u[i].conjugate() * gu[i]
            nrm2 = nrm2.real.mid()
            if not nrm2 > 0:
                raise PrecisionLoss("shifted basis lost independence")
            sc = (1 / nrm2.sqrt()).mid()
            p = [(x * sc).mid() for x in u]
            gp = [(x * sc).mid() for x in gu]
            psis.append(p)
            gpsis.append(gp)
            for _sweep in range(2):
                c = acb(0)
                for i in range(L):
                    c += p[i].conjugate() * gr[i]
                c = c.mid()
                r = [(a - c * b).mid() for a, b in zip(r, p)]
                gr = [(a - c * b).mid() for a, b in zip(gr, gp)]
            d2 = acb(0)
            for i in range(L):
                d2 += r[i].conjugate() * gr[i]
            out.append(math.sqrt(max(float(d2.real.mid()), 0.0)))
    # nested feasible sets: enforce the monotone envelope of rounding noise
    for k in range(1, len(out)):
        out[k] = min(out[k], out[k - 1])
    return out


def dist_to_invariant_subspace(space: WeightedSpace, w: complex, N: int,
                               grid: QuadratureGrid = QuadratureGrid()) -> float:
    """delta_N(w) = min over deg q <= N-1 of ||1 - (z - w) q||_(v,n)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    return delta_profile(gram_matrix(space, N, grid), w)[N - 1]


def kernel_coefficients(gm: GramMatrix, w: complex, N: Optional[int] = None) -> List[acb]:
    """Coefficients of K_w = sum_{k<=N} conj(phi_k(w)) phi_k."""
    N = gm.N if N is None else N
    with working_precision(gm.bits):
        wa = acb(complex(w).real, complex(w).imag)
        K = [acb(0)] * (gm.N + 1)
        for ph in gm.phis[: N + 1]:
            c = _eval(ph, wa).conjugate()
            K = [a + c * b for a, b in zip(K, ph)]
    return K


def truncated_functional(gm: GramMatrix, w: complex, F: Sequence[complex], N: Optional[int] = None) -> complex:
    """Lambda(F) = <F, K_w> computed through the Gram data (not by evaluating F)."""
    K = kernel_coefficients(gm, w, N)
    with working_precision(gm.bits):
        Fa = [acb(complex(c).real, complex(c).imag) for c in F]
        val = inner(gm, Fa, K)
    return complex(float(val.real.mid()), float(val.imag.mid()))
