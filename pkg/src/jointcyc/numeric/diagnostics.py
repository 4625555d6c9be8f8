"""Boundary diagnostics for H_(v,n): growth of lambda_N(w), decay of delta_N(w),
the reciprocal-power norm, and batch scans."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .gram import (GramMatrix, IllConditioned, PrecisionLoss, WeightedSpace, delta_profile,
                   gram_matrix, lambda_profile)
from .quadrature import QuadratureGrid
from .weights import ArcSetWeight, ConstantWeight, SeriesWeight, WeightSpec, chord

SLOPE_LO = 0.3
SLOPE_HI = 1.0
DEFAULT_SCHEDULE = (10, 20, 30, 40, 50, 60)

BOUNDED, DIVERGENT, INCONCLUSIVE = "Bounded", "Divergent", "Inconclusive"


class NonConvergent(ArithmeticError):
    """Successive quadrature refinements disagree."""


def log_slope(ns: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log(values) against log(ns) over the top half."""
    k = len(ns) // 2 if len(ns) > 2 else 0
    x = np.log(np.asarray(ns[k:], dtype=float))
    y = np.log(np.asarray(values[k:], dtype=float))
    if len(x) < 2:
        raise ValueError("need at least two schedule points")
    return float(np.polyfit(x, y, 1)[0])


def classify_slope(slope: float, slope_lo: float = SLOPE_LO, slope_hi: float = SLOPE_HI) -> str:
    if slope < slope_lo:
        return BOUNDED
    if slope > slope_hi:
        return DIVERGENT
    return INCONCLUSIVE


@dataclass
class KernelDiagnostic:
    w: complex
    samples: List[Tuple[int, float]]
    classification: str
    slope: float
    slope_lo: float = SLOPE_LO
    slope_hi: float = SLOPE_HI
    monotone: bool = True
    ill_conditioned: bool = False
    conditions: List[float] = field(default_factory=list)

    def to_json(self):
        return {"w": [self.w.real, self.w.imag], "classification": self.classification,
                "slope": self.slope, "slope_lo": self.slope_lo, "slope_hi": self.slope_hi,
                "monotone": self.monotone, "ill_conditioned": self.ill_conditioned,
                "samples": [[n, v] for n, v in self.samples]}


def _check_schedule(schedule: Sequence[int]) -> List[int]:
    sched = [int(n) for n in schedule]
    if not sched or any(b <= a for a, b in zip(sched, sched[1:])) or sched[0] < 1:
        raise ValueError("N_schedule must be increasing positive integers")
    return sched


def _monotone(values: Sequence[float], tol: float) -> bool:
    return all(b >= a * (1 - tol) for a, b in zip(values, values[1:]))


def diagnose(gm: GramMatrix, w: complex, schedule: Sequence[int], slope_lo: float = SLOPE_LO,
             slope_hi: float = SLOPE_HI) -> KernelDiagnostic:
    """Classify w from an already assembled Gram matrix (degree cap >= max schedule)."""
    sched = _check_schedule(schedule)
    prof = lambda_profile(gm, w)
    samples = [(n, prof[n]) for n in sched]
    conds = [gm.condition_estimate(n) for n in sched]
    ill = any(gm.ill_conditioned(n) for n in sched)
    tol = max(1e-12, max(conds) * 10.0 ** (-gm.digits + 2))
    mono = _monotone(prof[: sched[-1] + 1], tol)
    slope = log_slope(sched, [v for _, v in samples])
    cls = classify_slope(slope, slope_lo, slope_hi)
    if ill or not mono:
        cls = INCONCLUSIVE
    return KernelDiagnostic(complex(w), samples, cls, slope, slope_lo, slope_hi, mono, ill, conds)


def classify_point(space: WeightedSpace, w: complex, N_schedule: Sequence[int] = DEFAULT_SCHEDULE,
                   grid: QuadratureGrid = QuadratureGrid(), slope_lo: float = SLOPE_LO,
                   slope_hi: float = SLOPE_HI) -> KernelDiagnostic:
    """Bounded / Divergent / Inconclusive from the log-log slope of lambda_N(w)."""
    if abs(abs(complex(w)) - 1) > 1e-12:
        raise ValueError("classify_point expects a unimodular point")
    sched = _check_schedule(N_schedule)
    return diagnose(gram_matrix(space, sched[-1], grid), w, sched, slope_lo, slope_hi)


@dataclass
class DistanceDiagnostic:
    w: complex
    samples: List[Tuple[int, float]]
    classification: str
    slope: float

    def to_json(self):
        return {"w": [self.w.real, self.w.imag], "classification": self.classification,
                "slope": self.slope, "samples": [[n, v] for n, v in self.samples]}


def diagnose_distance(gm: GramMatrix, w: complex, schedule: Sequence[int], slope_lo: float = SLOPE_LO,
                      slope_hi: float = SLOPE_HI) -> DistanceDiagnostic:
    """Bounded when delta_N(w) stays above a floor (slope of -2 log delta below slope_lo),
    Divergent when delta_N(w) -> 0 (slope above slope_hi)."""
    sched = _check_schedule(schedule)
    prof = delta_profile(gm, w)
    samples = [(n, prof[n - 1]) for n in sched]
    vals = [max(d, 1e-300) ** -2 for _, d in samples]
    slope = log_slope(sched, vals)
    cls = classify_slope(slope, slope_lo, slope_hi)
    if any(gm.ill_conditioned(n) for n in sched):
        cls = INCONCLUSIVE
    return DistanceDiagnostic(complex(w), samples, cls, slope)


# ---------------------------------------------------------------------------
# || 1/(z - w)^3 ||_v^2 by double-precision quadrature


def _log_weight_grid(v: WeightSpec, r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    if isinstance(v, ConstantWeight):
        return np.full(np.broadcast(r, theta).shape, math.log(v.c))
    if isinstance(v, ArcSetWeight):
        ang = np.full(theta.shape, np.inf)
        for a in v.arcs:
            off = np.abs((theta - a.center + np.pi) % (2 * np.pi) - np.pi)
            ang = np.minimum(ang, np.maximum(0.0, off - a.half_width))
        return -(2 * np.sin(np.minimum(ang, np.pi) / 2)) / (1 - r)
    logs = [math.log(a) + _log_weight_grid(c, r, theta) for a, c in zip(v.coefficients, v.components)]
    return np.logaddexp.reduce(np.stack(logs), axis=0)


def _critical_angles(v: WeightSpec) -> List[float]:
    if isinstance(v, ArcSetWeight):
        return [x for a in v.arcs for x in (a.start, a.end)]
    if isinstance(v, SeriesWeight):
        return [x for c in v.components for x in _critical_angles(c)]
    return []


def gamma_distance(v: WeightSpec, w: complex) -> Optional[float]:
    """Euclidean distance from w to Gamma (None for a constant weight)."""
    if isinstance(v, ConstantWeight):
        return None
    comps = v.components if isinstance(v, SeriesWeight) else (v,)
    best = math.inf
    r, th = abs(w), math.atan2(w.imag, w.real)
    for c in comps:
        for a in c.arcs:
            if a.angular_distance(th) == 0:
                best = min(best, abs(r - 1))
            for e in (a.start, a.end):
                best = min(best, abs(w - complex(math.cos(e), math.sin(e))))
    return best


def _panels(lo: float, hi: float, centers: Sequence[float], h0: float, hmax: float) -> np.ndarray:
    """Breakpoints on [lo, hi] refined geometrically (from width h0) toward each center."""
    pts = {lo, hi}
    for c in centers:
        for sgn in (1, -1):
            d = h0
            while d < hmax * 2:
                x = c + sgn * d
                if lo < x < hi:
                    pts.add(x)
                d *= 2
        if lo < c < hi:
            pts.add(c)
    br = sorted(pts)
    out = [br[0]]
    for b in br[1:]:
        k = max(1, math.ceil((b - out[-1]) / hmax))
        a = out[-1]
        out += [a + (b - a) * i / k for i in range(1, k + 1)]
    return np.array(out)


def _composite(br: np.ndarray, q: int):
    x, wt = np.polynomial.legendre.leggauss(q)
    a, b = br[:-1, None], br[1:, None]
    return ((a + b) / 2 + (b - a) / 2 * x).ravel(), ((b - a) / 2 * wt).ravel()


def _reciprocal_quadrature(v: WeightSpec, w: complex, level: int) -> float:
    J = 6 + 4 * level
    h0 = 2.0 ** (-J)
    rbr = _panels(0.0, 1.0, [1.0], h0, 1 / 16)
    thw = math.atan2(w.imag, w.real)
    centers = [thw] + _critical_angles(v)
    centers = centers + [c + s * 2 * math.pi for c in centers for s in (-1, 1)]
    tbr = _panels(-math.pi, math.pi, centers, h0, 0.1)
    r, wr = _composite(rbr, 12)
    t, wt = _composite(tbr, 12)
    R, T = np.meshgrid(r, t, indexing="ij")
    z = R * np.exp(1j * T)
    logv = _log_weight_grid(v, R, T)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        f = np.exp(logv - 6 * np.log(np.abs(z - w))) * R
    return float(wr @ f @ wt) / math.pi


@dataclass
class ReciprocalNorm:
    w: complex
    value: float
    finite: bool
    dist: Optional[float]
    ratio: Optional[float]
    levels: List[float]

    def to_json(self):
        return {"w": [self.w.real, self.w.imag], "value": self.value if self.finite else "Infinity",
                "finite": self.finite, "dist": self.dist, "ratio": self.ratio, "levels": self.levels}


def reciprocal_norm(space: WeightedSpace, w: complex, levels: int = 4, rtol: float = 0.05,
                    strict: bool = False) -> ReciprocalNorm:
    """Estimate ||1/(z - w)^3||_v^2 under successive boundary refinements.

    If the last two refinements differ by more than ``rtol`` the result carries
    the infinity flag (or NonConvergent is raised when ``strict``).
    """
    w = complex(w)
    if abs(w) < 1:
        raise ValueError("reciprocal_norm expects |w| >= 1")
    vals = [_reciprocal_quadrature(space.weight, w, k) for k in range(levels)]
    a, b = vals[-2], vals[-1]
    finite = math.isfinite(b) and abs(b - a) <= rtol * abs(b)
    if not finite and strict:
        raise NonConvergent(f"refinements {a:.4g} -> {b:.4g}")
    d = gamma_distance(space.weight, w)
    ratio = b * d ** 6 if (finite and d) else None
    return ReciprocalNorm(w, b if finite else math.inf, finite, d, ratio, vals)


# ---------------------------------------------------------------------------
# scans


def boundary_grid(count: int) -> List[complex]:
    """count equally spaced unimodular points starting at 1."""
    return [complex(math.cos(2 * math.pi * k / count), math.sin(2 * math.pi * k / count)) for k in range(count)]


@dataclass
class ScanResult:
    space: WeightedSpace
    schedule: List[int]
    points: List[complex]
    lambdas: List[KernelDiagnostic]
    deltas: List[DistanceDiagnostic]
    gram: GramMatrix
    slope_lo: float
    slope_hi: float

    def agreement(self) -> List[bool]:
        """Per point: True when both routes are conclusive and agree, None-like False otherwise."""
        return [a.classification == b.classification for a, b in zip(self.lambdas, self.deltas)]

    def csv_text(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["w_re", "w_im", "N", "lambda_N", "delta_N", "condition"])
        for w, ld, dd in zip(self.points, self.lambdas, self.deltas):
            deltas = dict(dd.samples)
            for (n, lam), cond in zip(ld.samples, ld.conditions):
                out.writerow([_fmt(w.real), _fmt(w.imag), n, _fmt(lam), _fmt(deltas[n]), _fmt(cond)])
        return buf.getvalue()

    def summary(self):
        return {
            "n": self.space.n,
            "weight": self.space.weight.to_json(),
            "N_schedule": self.schedule,
            "thresholds": {"slope_lo": self.slope_lo, "slope_hi": self.slope_hi},
            "points": [
                {"w": [_round(w.real), _round(w.imag)], "lambda": ld.classification,
                 "lambda_slope": _round(ld.slope), "delta": dd.classification,
                 "delta_slope": _round(dd.slope), "monotone": ld.monotone}
                for w, ld, dd in zip(self.points, self.lambdas, self.deltas)
            ],
            "series_truncation_bound": 0.0,
        }


def _fmt(x: float) -> str:
    return repr(float(x)) if math.isfinite(x) else "inf"


def _round(x: float) -> float:
    return float(f"{x:.12g}")


def scan(space: WeightedSpace, points: Sequence[complex], N_schedule: Sequence[int] = DEFAULT_SCHEDULE,
         grid: QuadratureGrid = QuadratureGrid(), slope_lo: float = SLOPE_LO, slope_hi: float = SLOPE_HI,
         threads: int = 1) -> ScanResult:
    """lambda_N and delta_N at each point; results are in input order for any thread count."""
    sched = _check_schedule(N_schedule)
    gm = gram_matrix(space, sched[-1], grid)

    def work(w):
        return diagnose(gm, w, sched, slope_lo, slope_hi), diagnose_distance(gm, w, sched, slope_lo, slope_hi)

    pts = [complex(w) for w in points]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            res = list(pool.map(work, pts))
    else:
        res = [work(w) for w in pts]
    return ScanResult(space, sched, pts, [a for a, _ in res], [b for _, b in res], gm, slope_lo, slope_hi)


__all__ = ["BOUNDED", "DIVERGENT", "INCONCLUSIVE", "KernelDiagnostic", "DistanceDiagnostic",
           "NonConvergent", "ReciprocalNorm", "ScanResult", "classify_point", "diagnose",
           "diagnose_distance", "reciprocal_norm", "scan", "boundary_grid", "gamma_distance",
           "IllConditioned", "PrecisionLoss", "log_slope"]
