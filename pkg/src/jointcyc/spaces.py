"""Function-space catalog, maximal domains and cyclicity decisions."""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .ideal import IllConditioned, buchberger, codimension, factor_ideal, solve_variety
from .poly import (GaussianRational, MultiPolynomial, derivative, divide_exact, evaluate, gcd,
                   serialize, squarefree_part, to_text)
from .univariate import approximate_roots, to_univariate, unimodular_root_count
from .zeros import (TORUS_MARGIN, ZeroReport, _event_angles, _torus_points, polydisk_zero,
                    split_contents, unit_point)

BOUNDARY_MARGIN = 1e-7
RESIDUAL_TOL = 1e-9


class NotSymbolic(ValueError):
    """The space has no symbolic classification; use the numeric lab."""


class Unsupported(ValueError):
    """The space/dimension combination is outside what the theory decides."""


# ---------------------------------------------------------------------------
# spaces


@dataclass(frozen=True)
class Hardy:
    p: float
    d: int

    def __post_init__(self):
        if not (self.p > 0):
            raise ValueError("Hardy exponent must be positive")
        if self.d < 1:
            raise ValueError("dimension must be at least 1")

    def label(self) -> str:
        p = "inf" if math.isinf(self.p) else f"{self.p:g}"
        return f"H^{p}(D^{self.d})"

    def to_json(self):
        return {"type": "hardy", "p": "inf" if math.isinf(self.p) else self.p, "d": self.d}


@dataclass(frozen=True)
class DirichletType:
    t: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(str(self.t)) if isinstance(self.t, float) else Fraction(self.t))
        if self.d < 1:
            raise ValueError("dimension must be at least 1")

    def label(self) -> str:
        return f"D_{self.t}(D^{self.d})"

    def to_json(self):
        return {"type": "dirichlet", "t": str(self.t), "d": self.d}


@dataclass(frozen=True)
class WeightedHvn:
    weight: Any
    n: int
    d: int = 1

    def __post_init__(self):
        if self.d != 1:
            raise ValueError("weighted spaces are defined on the unit disk only")
        if self.n < 0:
            raise ValueError("n must be nonnegative")

    def label(self) -> str:
        return f"H_(v,{self.n})"

    def to_json(self):
        return {"type": "weighted_hvn", "weight": self.weight.to_json(), "n": self.n}


SpaceSpec = Union[Hardy, DirichletType, WeightedHvn]


@dataclass(frozen=True)
class MaximalDomainSpec:
    kind: str  # "OpenPolydisk" | "ClosedPolydisk"
    dim: int
    envelope_equals_maximal: bool = True
    envelope_note: str = "reported equal to the maximal domain; conjectural in general"

    @property
    def closed(self) -> bool:
        return self.kind == "ClosedPolydisk"

    def classify(self, point: Sequence, margin: float = BOUNDARY_MARGIN) -> str:
        """'inside', 'outside' or 'boundary-uncertain'.  Exact points are decided exactly."""
        if len(point) != self.dim:
            raise ValueError("point has the wrong dimension")
        if all(isinstance(z, (GaussianRational, int, Fraction)) for z in point):
            mods = [GaussianRational.coerce(z).abs2() for z in point]
            if self.closed:
                return "inside" if all(m <= 1 for m in mods) else "outside"
            return "inside" if all(m < 1 for m in mods) else "outside"
        mods = [abs(complex(z)) for z in point]
        top = max(mods)
        if abs(top - 1) <= margin:
            return "boundary-uncertain"
        return "inside" if top < 1 else "outside"

    def to_json(self):
        return {"kind": self.kind, "dim": self.dim, "envelope": self.kind,
                "envelope_note": self.envelope_note}


def maximal_domain(space: SpaceSpec) -> MaximalDomainSpec:
    if isinstance(space, WeightedHvn):
        raise NotSymbolic("weighted H_(v,n) spaces have no symbolic maximal domain; use the numeric lab")
    if isinstance(space, Hardy):
        return MaximalDomainSpec("OpenPolydisk", space.d)
    if isinstance(space, DirichletType):
        return MaximalDomainSpec("ClosedPolydisk" if space.t > 1 else "OpenPolydisk", space.d)
    raise TypeError(f"unknown space {space!r}")


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class CyclicityVerdict:
    status: str  # Cyclic | NotCyclic | JointlyCyclic | NotJointlyCyclic | Uncertain
    certificate: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)
    hypothesis_met: bool = True
    witness: Optional[Tuple[complex, ...]] = None

    @property
    def positive(self) -> Optional[bool]:
        if self.status in ("Cyclic", "JointlyCyclic"):
            return True
        if self.status in ("NotCyclic", "NotJointlyCyclic"):
            return False
        return None

    def to_json(self):
        out = {"status": self.status, "hypothesis_met": self.hypothesis_met,
               "certificate": self.certificate}
        out["witness"] = None if self.witness is None else [[z.real, z.imag] for z in self.witness]
        return out


def _point_json(w):
    return None if w is None else [[complex(z).real, complex(z).imag] for z in w]


def _check_space(space: SpaceSpec, polys: Sequence[MultiPolynomial]) -> MaximalDomainSpec:
    omega = maximal_domain(space)
    if isinstance(space, DirichletType) and space.d > 2:
        raise Unsupported("Dirichlet-type classification is only available for d <= 2")
    for P in polys:
        if P.dim != space.d:
            raise ValueError(f"polynomial dimension {P.dim} does not match the space dimension {space.d}")
    return omega


# ---------------------------------------------------------------------------
# single polynomials


def _zero_verdict(rep: ZeroReport, region: str, positive="Cyclic", negative="NotCyclic"):
    cert = {"test": f"zero location on the {region}", "reason": rep.reason,
            "witness": _point_json(rep.witness)}
    if rep.status == "zero":
        return CyclicityVerdict(negative, cert, True, rep.witness)
    if rep.status == "uncertain":
        return CyclicityVerdict("Uncertain", cert, True, None)
    return CyclicityVerdict(positive, cert, True, None)


@functools.lru_cache(maxsize=4096)
def is_cyclic(space: SpaceSpec, P: MultiPolynomial) -> CyclicityVerdict:
    """Cyclicity of a single polynomial (see the README for the rules per space)."""
    _check_space(space, [P])
    if P.is_zero():
        raise ValueError("the zero polynomial is never cyclic; pass a nonzero polynomial")
    base = {"space": space.label(), "polynomial": serialize(P)}
    if isinstance(space, Hardy):
        v = _zero_verdict(polydisk_zero(P, closed=False), "open polydisk")
    elif space.t > 1:
        v = _zero_verdict(polydisk_zero(P, closed=True), "closed polydisk")
    elif space.d == 1 or space.t <= Fraction(1, 2):
        v = _zero_verdict(polydisk_zero(P, closed=False), "open polydisk")
    else:
        v = _dirichlet_middle(P)
    v.certificate.update(base)
    return v


def _dirichlet_middle(P: MultiPolynomial) -> CyclicityVerdict:
    """D_t(D^2), 1/2 < t <= 1: zero-free on D^2 and finitely many torus zeros,
    factor-wise (one-variable factors z_j - w with |w| = 1 are cyclic)."""
    v = _zero_verdict(polydisk_zero(P, closed=False), "open bidisk")
    if v.status != "Cyclic":
        return v
    if len(P.variables()) < 2:
        v.certificate["torus"] = "one-variable polynomial: factors z_j - w with |w| >= 1 are cyclic"
        return v
    c1, c2, rest = split_contents(P)
    record = {"one_variable_factors": [serialize(c1), serialize(c2)],
              "interpretation": "factor-wise: one-variable factors with unimodular roots are cyclic"}
    if rest.is_constant():
        v.certificate["torus"] = record
        return v
    h = gcd(rest, rest.reflect())
    record["reflection_gcd"] = serialize(h)
    if not h.is_constant():
        # zero-free on D^2 forces every slice root of h on the circle: a torus curve
        record["torus_zeros"] = "infinite"
        cert = dict(v.certificate, torus=record, zero_free_reason=v.certificate["reason"],
                    reason="zero-free on the open bidisk but vanishing on a curve in the torus",
                    test="torus zeros of the two-variable part are infinite")
        return CyclicityVerdict("NotCyclic", cert, True, None)
    pts = _torus_points(rest, rest.reflect())
    record["torus_zeros"] = "finite" if pts is not None else "finite (enumeration ill-conditioned)"
    if pts is not None:
        record["points"] = [_point_json(p.coordinates) for p in pts]
    v.certificate["torus"] = record
    return v


@dataclass(frozen=True)
class TorusZeros:
    status: str  # "Finite" | "Infinite" | "Uncertain"
    points: Tuple[Tuple[complex, ...], ...] = ()
    witness_factor: Optional[MultiPolynomial] = None

    def to_json(self):
        return {"status": self.status, "points": [_point_json(p) for p in self.points],
                "witness_factor": None if self.witness_factor is None else serialize(self.witness_factor)}


def torus_zero_finiteness(P: MultiPolynomial) -> TorusZeros:
    """Decide whether P in two variables has finitely many zeros on the torus T^2."""
    if P.is_zero():
        raise ValueError("zero polynomial")
    if P.dim != 2:
        raise ValueError("torus_zero_finiteness expects a polynomial in two variables")
    vs = P.variables()
    if not vs:
        return TorusZeros("Finite")
    if len(vs) == 1:
        u = to_univariate(P)
        if unimodular_root_count(u):
            return TorusZeros("Infinite", (), P)
        return TorusZeros("Finite")
    c1, c2, rest = split_contents(P)
    for c in (c1, c2):
        if not c.is_constant() and unimodular_root_count(to_univariate(c)):
            return TorusZeros("Infinite", (), c)
    if rest.is_constant():
        return TorusZeros("Finite")
    h = gcd(rest, rest.reflect())
    q = rest
    points: List[Tuple[complex, ...]] = []
    if not h.is_constant():
        hs = squarefree_part(h)
        while True:
            g = gcd(q, hs)
            if g.is_constant():
                break
            q = divide_exact(q, g)
        # unimodular slice roots of hs are constant in number between events
        events = _event_angles(hs)
        if events is None:
            return TorusZeros("Uncertain")
        samples = [0.0] if not events else [
            (a + b) / 2 for a, b in zip(events, events[1:] + [events[0] + 2 * math.pi])]
        for theta in samples:
            sl = hs.substitute(2, unit_point(theta))
            if not sl.is_constant() and unimodular_root_count(to_univariate(sl)):
                return TorusZeros("Infinite", (), hs)
        pts = _torus_points(hs, derivative(hs, 1)) if not derivative(hs, 1).is_constant() else []
        if pts is None:
            return TorusZeros("Uncertain")
        for p in pts:
            points.append(p.coordinates)
    if not q.is_constant() and len(q.variables()) == 2:
        pts = _torus_points(q, q.reflect())
        if pts is None:
            return TorusZeros("Uncertain")
        points += [p.coordinates for p in pts]
    # keep only genuine torus zeros of P
    out = []
    for w in points:
        if abs(complex(evaluate(P, [complex(z) for z in w]))) < 1e-8 and w not in out:
            out.append(w)
    return TorusZeros("Finite", tuple(out))


# ---------------------------------------------------------------------------
# families


def _membership(omega: MaximalDomainSpec, pt) -> str:
    if pt.exact is not None:
        return omega.classify(pt.exact)
    return omega.classify(pt.coordinates)


def is_jointly_cyclic(space: SpaceSpec, family: Sequence[MultiPolynomial],
                      options: Optional[Dict[str, Any]] = None) -> CyclicityVerdict:
    """Joint cyclicity of a polynomial family through gcd, cofactor variety and Omega_max.

    ``options``: ``residual_tol`` (default 1e-9), ``boundary_margin`` (1e-7),
    ``extended_search`` (False): when the finite-variety hypothesis fails in
    d > 2, look for a common zero in Omega_max and for a cyclic member instead
    of returning Uncertain straight away.
    """
    opts = {"residual_tol": RESIDUAL_TOL, "boundary_margin": BOUNDARY_MARGIN, "extended_search": False}
    opts.update(options or {})
    family = list(family)
    if not family:
        raise ValueError("empty family")
    omega = _check_space(space, family)
    if all(f.is_zero() for f in family):
        raise ValueError("family must contain a nonzero polynomial")
    d = space.d
    g, cof = factor_ideal(family)
    trace: Dict[str, Any] = {"space": space.label(), "omega_max": omega.to_json(),
                             "family": [serialize(f) for f in family],
                             "gcd": serialize(g), "cofactors": [serialize(c) for c in cof]}
    nonzero_cof = [c for c in cof if not c.is_zero()]
    if d == 1:
        G = buchberger(family)
        if [x.monic() for x in G.generators] != [g]:
            raise AssertionError("univariate ideal is not generated by the gcd")
        trace["steps"] = ["factor_ideal", "principal ideal cross-check", "is_cyclic(g)"]
        return _finish_with_gcd(space, g, trace, hypothesis=True)
    G = buchberger(nonzero_cof)
    Q = codimension(G)
    trace["cofactor_ideal"] = G.to_json()
    trace["standard_monomials"] = Q.to_json()
    if Q.infinite:
        if d == 2:
            raise AssertionError("cofactor ideal of a gcd-1 family in two variables must be zero-dimensional")
        trace["steps"] = ["factor_ideal", "codimension: infinite"]
        if opts["extended_search"]:
            return _extended(space, family, omega, trace, opts)
        return CyclicityVerdict("Uncertain", dict(trace, reason="finite-variety hypothesis not met"), False, None)
    trace["steps"] = ["factor_ideal", "codimension", "solve_variety", "membership", "is_cyclic(g)"]
    try:
        sol = solve_variety(G, tol=opts["residual_tol"])
    except IllConditioned as exc:
        return CyclicityVerdict("Uncertain", dict(trace, reason=f"variety: {exc}"), True, None)
    trace["variety_points"] = [p.to_json() for p in sol.points]
    trace["residuals"] = sol.residuals
    uncertain = False
    for pt in sol.points:
        where = _membership(omega, pt) if pt.exact is not None else omega.classify(pt.coordinates, opts["boundary_margin"])
        if where == "inside":
            w = pt.coordinates
            cert = dict(trace, witness=_point_json(w), witness_exact=pt.exact is not None,
                        witness_residuals=[abs(complex(evaluate(f, list(w)))) for f in family])
            if g.is_constant() or _witness_ok(family, w, opts["residual_tol"]):
                return CyclicityVerdict("NotJointlyCyclic", cert, True, w)
        if where == "boundary-uncertain":
            uncertain = True
    if uncertain:
        return CyclicityVerdict("Uncertain", dict(trace, reason="variety point within the boundary margin"), True, None)
    return _finish_with_gcd(space, g, trace, hypothesis=True)


def _witness_ok(family, w, tol) -> bool:
    return all(abs(complex(evaluate(f, list(w)))) < max(tol, 1e-7) for f in family)


def _finish_with_gcd(space, g, trace, hypothesis) -> CyclicityVerdict:
    if g.is_constant():
        trace["gcd_verdict"] = "constant"
        return CyclicityVerdict("JointlyCyclic", trace, hypothesis, None)
    v = is_cyclic(space, g)
    trace["gcd_verdict"] = v.to_json()
    if v.status == "Cyclic":
        return CyclicityVerdict("JointlyCyclic", trace, hypothesis, None)
    if v.status == "NotCyclic":
        if v.witness is not None:
            trace["witness"] = _point_json(v.witness)
        return CyclicityVerdict("NotJointlyCyclic", trace, hypothesis, v.witness)
    return CyclicityVerdict("Uncertain", trace, hypothesis, None)


_SEARCH_VALUES = (Fraction(0), Fraction(1, 2), Fraction(-1, 2), GaussianRational(0, Fraction(1, 2)),
                  GaussianRational(0, Fraction(-1, 2)))


def _extended(space, family, omega, trace, opts) -> CyclicityVerdict:
    d = space.d
    for f in family:
        if f.is_zero():
            continue
        v = is_cyclic(space, f)
        if v.status == "Cyclic":
            trace["reason"] = "a member of the family is cyclic"
            trace["cyclic_member"] = serialize(f)
            return CyclicityVerdict("JointlyCyclic", trace, False, None)
    # fix all but two coordinates at exact interior values and solve
    for keep in itertools.combinations(range(1, d + 1), 2):
        fixed = [j for j in range(1, d + 1) if j not in keep]
        for vals in itertools.product(_SEARCH_VALUES, repeat=len(fixed)):
            extra = [MultiPolynomial.variable(d, j) - v for j, v in zip(fixed, vals)]
            G = buchberger(list(family) + extra)
            if codimension(G).infinite or G.is_unit():
                continue
            try:
                sol = solve_variety(G, tol=opts["residual_tol"])
            except IllConditioned:
                continue
            for pt in sol.points:
                if _membership(omega, pt) == "inside" and _witness_ok(family, pt.coordinates, opts["residual_tol"]):
                    w = pt.coordinates
                    cert = dict(trace, reason="common zero found in the maximal domain",
                                witness=_point_json(w))
                    return CyclicityVerdict("NotJointlyCyclic", cert, False, w)
    return CyclicityVerdict("Uncertain", dict(trace, reason="finite-variety hypothesis not met; "
                                              "no witness or cyclic member found"), False, None)


# ---------------------------------------------------------------------------
# product consistency


@dataclass(frozen=True)
class ProductReport:
    product_route: CyclicityVerdict
    gcd_route: CyclicityVerdict
    cofactor_route: CyclicityVerdict
    combined: Optional[bool]
    agree: bool

    def to_json(self):
        return {"product_route": self.product_route.to_json(), "gcd_route": self.gcd_route.to_json(),
                "cofactor_route": self.cofactor_route.to_json(), "combined": self.combined,
                "agree": self.agree}


def product_cyclicity_check(space: SpaceSpec, Q: Sequence[MultiPolynomial], g: MultiPolynomial) -> ProductReport:
    """Compare {g q} against (g cyclic) and (Q jointly cyclic)."""
    prod = is_jointly_cyclic(space, [g * q for q in Q])
    gv = is_cyclic(space, g)
    qv = is_jointly_cyclic(space, list(Q))
    if gv.positive is None or qv.positive is None:
        combined = None
    else:
        combined = gv.positive and qv.positive
    agree = prod.positive == combined if combined is not None and prod.positive is not None else \
        (prod.positive is None and combined is None)
    return ProductReport(prod, gv, qv, combined, agree)
