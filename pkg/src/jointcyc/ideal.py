"""Polynomial ideals: Groebner bases, normal forms, codimension, varieties."""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import scipy.linalg

from .poly import (Exponent, GaussianRational, MultiPolynomial, ONE_Q, ZERO_Q, derivative,
                   divide_exact, evaluate, gcd_many, serialize)


class IllConditioned(ArithmeticError):
    """Variety points could not be polished to the requested residual."""


# ---------------------------------------------------------------------------
# term orders


@dataclass(frozen=True)
class TermOrder:
    """``kind`` is lex, grlex or grevlex; ``permutation`` reorders variables
    (0-based positions, most significant first)."""

    kind: str = "grlex"
    permutation: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in ("lex", "grlex", "grevlex"):
            raise ValueError(f"unknown term order {self.kind!r}")

    def key(self, e: Exponent) -> Tuple[int, ...]:
        if self.permutation is not None:
            e = tuple(e[i] for i in self.permutation)
        if self.kind == "lex":
            return e
        if self.kind == "grlex":
            return (sum(e),) + e
        return (sum(e),) + tuple(-x for x in reversed(e))

    def leading(self, P: MultiPolynomial) -> Tuple[Exponent, GaussianRational]:
        return P.leading(self.key)

    def to_json(self):
        return {"kind": self.kind, "permutation": list(self.permutation) if self.permutation else None}


GRLEX = TermOrder("grlex")


def _divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


class _Poly:
    """Monic working polynomial with cached leading exponent."""

    __slots__ = ("lt", "terms")

    def __init__(self, lt, terms):
        self.lt = lt
        self.terms = terms


def _make_monic(terms: Dict[Exponent, GaussianRational], order: TermOrder) -> Optional[_Poly]:
    if not terms:
        return None
    lt = max(terms, key=order.key)
    inv = terms[lt].inverse()
    return _Poly(lt, {e: c * inv for e, c in terms.items()})


def _reduce(terms: Dict[Exponent, GaussianRational], basis: Sequence[_Poly],
            order: TermOrder) -> Dict[Exponent, GaussianRational]:
    """Full reduction of ``terms`` modulo monic ``basis``."""
    p = dict(terms)
    rem: Dict[Exponent, GaussianRational] = {}
    heap = [(tuple(-x for x in order.key(e)), e) for e in p]
    heapq.heapify(heap)
    while heap:
        _, e = heapq.heappop(heap)
        if e not in p:
            continue
        c = p[e]
        for g in basis:
            if _divides(g.lt, e):
                s = _sub(e, g.lt)
                for ge, gc in g.terms.items():
                    t = tuple(a + b for a, b in zip(ge, s))
                    if t == e:
                        continue
                    old = p.get(t)
                    v = -gc * c if old is None else old - gc * c
                    if v.is_zero():
                        p.pop(t, None)
                    else:
                        if old is None:
                            heapq.heappush(heap, (tuple(-x for x in order.key(t)), t))
                        p[t] = v
                del p[e]
                break
        else:
            rem[e] = c
            del p[e]
    return rem


def _spoly(f: _Poly, g: _Poly) -> Dict[Exponent, GaussianRational]:
    l = _lcm(f.lt, g.lt)
    sf, sg = _sub(l, f.lt), _sub(l, g.lt)
    out: Dict[Exponent, GaussianRational] = {}
    for e, c in f.terms.items():
        out[tuple(a + b for a, b in zip(e, sf))] = c
    for e, c in g.terms.items():
        t = tuple(a + b for a, b in zip(e, sg))
        v = out.get(t, ZERO_Q) - c
        if v.is_zero():
            out.pop(t, None)
        else:
            out[t] = v
    return out


# ---------------------------------------------------------------------------
# Groebner bases


@dataclass(frozen=True)
class GroebnerBasis:
    generators: Tuple[MultiPolynomial, ...]
    order: TermOrder
    dim: int

    @property
    def leading_exponents(self) -> List[Exponent]:
        return [self.order.leading(g)[0] for g in self.generators]

    def is_unit(self) -> bool:
        return len(self.generators) == 1 and self.generators[0].is_constant()

    def is_zero_ideal(self) -> bool:
        return not self.generators

    def _working(self) -> List[_Poly]:
        return [_Poly(self.order.leading(g)[0], g.terms) for g in self.generators]

    def to_json(self):
        return {"order": self.order.to_json(), "dim": self.dim,
                "basis": [serialize(g) for g in self.generators]}


def _update(G: List[int], B: List[Tuple[int, int]], h: int, polys: List[_Poly]):
    """Gebauer-Moeller pair update for a new basis element ``h``."""
    lh = polys[h].lt
    C = [(h, g) for g in G]
    D: List[Tuple[int, int]] = []
    while C:
        (_, g1) = C.pop(0)
        l1 = _lcm(lh, polys[g1].lt)
        coprime = all(x == 0 or y == 0 for x, y in zip(lh, polys[g1].lt))
        if coprime or not any(_divides(_lcm(lh, polys[g2].lt), l1) for (_, g2) in C + D):
            D.append((h, g1))
    E = [(a, b) for (a, b) in D
         if not all(x == 0 or y == 0 for x, y in zip(polys[a].lt, polys[b].lt))]
    B_new = []
    for (g1, g2) in B:
        l12 = _lcm(polys[g1].lt, polys[g2].lt)
        if (_divides(lh, l12) and _lcm(polys[g1].lt, lh) != l12 and _lcm(lh, polys[g2].lt) != l12):
            continue
        B_new.append((g1, g2))
    B_new.extend(E)
    G_new = [g for g in G if not _divides(lh, polys[g].lt)] + [h]
    return G_new, B_new


def buchberger(family: Sequence[MultiPolynomial], order: TermOrder = GRLEX) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``family``."""
    family = list(family)
    if not family:
        raise ValueError("empty family")
    dim = family[0].dim
    if any(f.dim != dim for f in family):
        raise ValueError("dimension mismatch")
    polys: List[_Poly] = []
    G: List[int] = []
    B: List[Tuple[int, int]] = []
    for f in sorted((f for f in family if not f.is_zero()), key=lambda f: order.key(order.leading(f)[0])):
        r = _make_monic(_reduce(f.terms, [polys[g] for g in G], order), order)
        if r is None:
            continue
        polys.append(r)
        G, B = _update(G, B, len(polys) - 1, polys)
    while B:
        B.sort(key=lambda pr: (order.key(_lcm(polys[pr[0]].lt, polys[pr[1]].lt)), pr))
        i, j = B.pop(0)
        h = _make_monic(_reduce(_spoly(polys[i], polys[j]), [polys[g] for g in G], order), order)
        if h is None:
            continue
        polys.append(h)
        G, B = _update(G, B, len(polys) - 1, polys)
    basis = _interreduce([polys[g] for g in G], order)
    gens = tuple(MultiPolynomial(dim, p.terms) for p in basis)
    out = GroebnerBasis(gens, order, dim)
    for f in family:
        if normal_form(f, out):
            raise AssertionError("generator not in the computed ideal")
    return out


def _interreduce(polys: List[_Poly], order: TermOrder) -> List[_Poly]:
    # drop elements whose leading term is divisible by another one
    polys = sorted(polys, key=lambda p: order.key(p.lt))
    minimal: List[_Poly] = []
    for p in polys:
        if not any(_divides(q.lt, p.lt) for q in minimal):
            minimal.append(p)
    out = []
    for k, p in enumerate(minimal):
        others = minimal[:k] + minimal[k + 1:]
        tail = {e: c for e, c in p.terms.items() if e != p.lt}
        red = _reduce(tail, others, order)
        red[p.lt] = ONE_Q
        out.append(_Poly(p.lt, red))
    out.sort(key=lambda p: order.key(p.lt), reverse=True)
    return out


def normal_form(P: MultiPolynomial, G: GroebnerBasis) -> MultiPolynomial:
    """Unique remainder of P modulo the ideal (no term divisible by a leading term)."""
    if P.dim != G.dim:
        raise ValueError("dimension mismatch")
    return MultiPolynomial(P.dim, _reduce(P.terms, G._working(), G.order))


def s_polynomial_certificate(G: GroebnerBasis) -> bool:
    """Every S-polynomial of the basis reduces to zero."""
    W = G._working()
    return all(not _reduce(_spoly(a, b), W, G.order) for a, b in itertools.combinations(W, 2))


# ---------------------------------------------------------------------------
# codimension


@dataclass(frozen=True)
class QuotientBasis:
    """Standard monomials of P_d / I, or ``infinite`` when there are infinitely many."""

    standard_monomials: Optional[Tuple[Exponent, ...]]

    @property
    def infinite(self) -> bool:
        return self.standard_monomials is None

    @property
    def count(self) -> Optional[int]:
        return None if self.standard_monomials is None else len(self.standard_monomials)

    def to_json(self):
        if self.infinite:
            return {"infinite": True}
        return [list(e) for e in self.standard_monomials]


def codimension(G: GroebnerBasis) -> QuotientBasis:
    if G.is_zero_ideal():
        return QuotientBasis(None)
    lts = G.leading_exponents
    bounds = []
    for j in range(G.dim):
        pure = [e[j] for e in lts if all(x == 0 for i, x in enumerate(e) if i != j) and e[j] > 0]
        if not pure and not any(sum(e) == 0 for e in lts):
            return QuotientBasis(None)
        bounds.append(min(pure) if pure else 0)
    if any(sum(e) == 0 for e in lts):
        return QuotientBasis(())
    std = [e for e in itertools.product(*(range(b) for b in bounds))
           if not any(_divides(l, e) for l in lts)]
    std.sort(key=G.order.key)
    return QuotientBasis(tuple(std))


# ---------------------------------------------------------------------------
# factorisation of a family


def factor_ideal(family: Sequence[MultiPolynomial]) -> Tuple[MultiPolynomial, List[MultiPolynomial]]:
    """F = g * (cofactors): g is the monic gcd, the cofactors have gcd 1."""
    g = gcd_many(family)
    return g, [divide_exact(f, g) for f in family]


# ---------------------------------------------------------------------------
# varieties


@dataclass(frozen=True)
class VarietyPoint:
    coordinates: Tuple[complex, ...]
    multiplicity: int
    residual: float
    exact: Optional[Tuple[GaussianRational, ...]] = None

    def to_json(self):
        out = {"point": [[z.real, z.imag] for z in self.coordinates],
               "multiplicity": self.multiplicity, "residual": self.residual}
        if self.exact is not None:
            out["exact"] = [[str(c.re), str(c.im)] for c in self.exact]
        return out


@dataclass(frozen=True)
class VarietySolution:
    points: Tuple[VarietyPoint, ...]
    codimension: int

    @property
    def residuals(self) -> List[float]:
        return [p.residual for p in self.points]

    def to_json(self):
        return {"points": [p.to_json() for p in self.points], "codimension": self.codimension}


def multiplication_matrices(G: GroebnerBasis, Q: QuotientBasis) -> List[List[List[GaussianRational]]]:
    """Exact matrices of multiplication by z_j on the standard-monomial basis."""
    std = list(Q.standard_monomials)
    index = {e: k for k, e in enumerate(std)}
    W = G._working()
    mats = []
    for j in range(G.dim):
        M = [[ZERO_Q] * len(std) for _ in std]
        for col, e in enumerate(std):
            shifted = e[:j] + (e[j] + 1,) + e[j + 1:]
            nf = _reduce({shifted: ONE_Q}, W, G.order)
            for t, c in nf.items():
                M[index[t]][col] = c
        mats.append(M)
    return mats


def snap_point(point: Sequence[complex], polys: Sequence[MultiPolynomial],
               max_denominators=(1, 2, 4, 10, 100, 1000, 10**4, 10**6)) -> Optional[Tuple[GaussianRational, ...]]:
    """Try to recognise a numerical common zero as an exact Gaussian-rational point."""
    for den in max_denominators:
        cand = tuple(GaussianRational(Fraction(z.real).limit_denominator(den),
                                      Fraction(z.imag).limit_denominator(den)) for z in point)
        if max(abs(complex(c) - z) for c, z in zip(cand, point)) > 1e-6:
            continue
        if all(evaluate(p, cand).is_zero() for p in polys):
            return cand
    return None


def _polish(x0, polys, jac, dps=50, iters=120):
    with mpmath.workdps(dps):
        x = mpmath.matrix([mpmath.mpc(z) for z in x0])
        d = len(x0)
        tiny = mpmath.mpf(10) ** (-dps + 5)
        for _ in range(iters):
            pt = [x[k] for k in range(d)]
            F = mpmath.matrix([evaluate(p, pt) for p in polys])
            J = mpmath.matrix([[evaluate(q, pt) for q in row] for row in jac])
            JH = J.H
            A = JH * J
            scale = max([abs(A[i, i]) for i in range(d)] + [mpmath.mpf(1)])
            for i in range(d):
                A[i, i] += scale * mpmath.mpf(10) ** (-2 * dps + 20)
            try:
                step = mpmath.lu_solve(A, JH * F)
            except ZeroDivisionError:
                break
            x = x - step
            if mpmath.norm(step) < tiny * (1 + mpmath.norm(x)):
                break
        pt = [x[k] for k in range(d)]
        res = max([abs(evaluate(p, pt)) for p in polys] + [mpmath.mpf(0)])
        return pt, res


def solve_variety(G: GroebnerBasis, tol: float = 1e-9, seed: int = 0) -> VarietySolution:
    """Common zeros of a zero-dimensional ideal with multiplicities.

    The multiplication matrices are simultaneously triangularised through the
    Schur form of a random combination; the diagonal entries are polished by
    Gauss-Newton at 50 digits against the basis polynomials.
    """
    Q = codimension(G)
    if Q.infinite:
        raise ValueError("ideal is not zero-dimensional")
    n = Q.count
    if n == 0:
        return VarietySolution((), 0)
    mats = [np.array([[complex(c) for c in row] for row in M]) for M in multiplication_matrices(G, Q)]
    rng = np.random.default_rng(seed)
    coef = rng.normal(size=G.dim) + 1j * rng.normal(size=G.dim)
    T, Z = scipy.linalg.schur(sum(c * M for c, M in zip(coef, mats)), output="complex")
    raw = [tuple(complex((Z.conj().T @ M @ Z)[k, k]) for M in mats) for k in range(n)]
    polys = list(G.generators)
    jac = [[derivative(p, j + 1) for j in range(G.dim)] for p in polys]
    polished = []
    for r in raw:
        pt, res = _polish(r, polys, jac)
        polished.append((pt, res))
    clusters: List[List[int]] = []
    for k, (pt, _) in enumerate(polished):
        for cl in clusters:
            ref = polished[cl[0]][0]
            if max(abs(a - b) for a, b in zip(pt, ref)) < 1e-10 * (1 + max(abs(a) for a in ref)):
                cl.append(k)
                break
        else:
            clusters.append([k])
    points = []
    for cl in clusters:
        pt, res = min((polished[k] for k in cl), key=lambda t: t[1])
        coords = tuple(complex(z) for z in pt)
        res = float(res)
        if res > tol:
            raise IllConditioned(f"residual {res:.3e} exceeds tolerance {tol:.1e}")
        exact = snap_point(coords, polys)
        if exact is not None:
            coords, res = tuple(complex(c) for c in exact), 0.0
        points.append(VarietyPoint(coords, len(cl), res, exact))
    points.sort(key=lambda p: tuple((round(z.real, 9), round(z.imag, 9)) for z in p.coordinates))
    return VarietySolution(tuple(points), n)
