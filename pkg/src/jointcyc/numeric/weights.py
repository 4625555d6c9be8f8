"""Weights v on the unit disk for the spaces H_(v,n).

A closed arc set Gamma gives v(z) = exp(-dist(z/|z|, Gamma) / (1 - |z|)) with the
planar (chordal) distance; series weights are positive combinations of such.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

TWO_PI = 2 * math.pi


class NonDisjoint(ValueError):
    """Two sets that must be at positive distance touch."""


def _wrap(theta: float) -> float:
    """Angle in [-pi, pi)."""
    return (theta + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class Arc:
    """Closed arc {e^{i theta} : |theta - center| <= half_width}; half_width in [0, pi]."""

    center: float
    half_width: float

    def __post_init__(self):
        if not 0 <= self.half_width <= math.pi:
            raise ValueError("half_width must lie in [0, pi]")
        object.__setattr__(self, "center", _wrap(self.center))

    @property
    def start(self) -> float:
        return self.center - self.half_width

    @property
    def end(self) -> float:
        return self.center + self.half_width

    def angular_distance(self, theta: float) -> float:
        """Geodesic distance on the circle from e^{i theta} to the arc."""
        off = abs(_wrap(theta - self.center))
        return max(0.0, off - self.half_width)

    def to_json(self):
        return {"center": self.center, "half_width": self.half_width}


def chord(delta: float) -> float:
    """Planar distance between two unit vectors an angle ``delta`` apart."""
    return 2 * math.sin(min(delta, math.pi) / 2)


@dataclass(frozen=True)
class ConstantWeight:
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("constant weight must be positive")

    def to_json(self):
        return {"type": "constant", "c": self.c}


@dataclass(frozen=True)
class ArcSetWeight:
    arcs: Tuple[Arc, ...]

    def __post_init__(self):
        if not self.arcs:
            raise ValueError("an arc set needs at least one arc")
        object.__setattr__(self, "arcs", tuple(self.arcs))

    def angular_distance(self, theta: float) -> float:
        return min(a.angular_distance(theta) for a in self.arcs)

    def distance(self, zeta: complex) -> float:
        """Chordal distance from a unit vector to Gamma."""
        return chord(self.angular_distance(math.atan2(zeta.imag, zeta.real)))

    def pieces(self) -> Tuple[List[Tuple[float, float]], List[Tuple[float, float]]]:
        """Merged arcs and the gaps between them as (start, end) angle pairs
        with start < end; gaps are listed counter-clockwise after each arc."""
        if any(a.half_width >= math.pi for a in self.arcs):
            return [(-math.pi, math.pi)], []
        ivs = sorted((a.start, a.end) for a in self.arcs)
        merged: List[List[float]] = []
        for s, e in ivs:
            if merged and s <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], e)
            else:
                merged.append([s, e])
        # arcs that run past the first start after going once around
        while len(merged) > 1 and merged[-1][1] >= merged[0][0] + TWO_PI:
            s, e = merged.pop()
            first = merged.pop(0)
            merged.append([s, max(e, first[1] + TWO_PI)])
        if merged[-1][1] - merged[-1][0] >= TWO_PI or (
                len(merged) == 1 and merged[0][1] >= merged[0][0] + TWO_PI):
            return [(-math.pi, math.pi)], []
        arcs = [(s, e) for s, e in merged]
        gaps = []
        for k, (s, e) in enumerate(arcs):
            nxt = arcs[(k + 1) % len(arcs)][0]
            while nxt <= e:
                nxt += TWO_PI
            gaps.append((e, nxt))
        return arcs, gaps

    def to_json(self):
        return {"type": "arcs", "arcs": [a.to_json() for a in self.arcs]}


@dataclass(frozen=True)
class SeriesWeight:
    components: Tuple[ArcSetWeight, ...]
    coefficients: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "coefficients", tuple(float(a) for a in self.coefficients))
        if len(self.components) != len(self.coefficients) or not self.components:
            raise ValueError("series weight needs matching nonempty components and coefficients")
        if any(not a > 0 for a in self.coefficients):
            raise ValueError("series coefficients must be positive")

    def truncation_bound(self, tail: Sequence[float] = ()) -> float:
        """Sup-norm bound of the omitted part (each v_k <= 1)."""
        return float(sum(tail))

    def distance(self, zeta: complex) -> float:
        return min(c.distance(zeta) for c in self.components)

    def to_json(self):
        return {"type": "series", "components": [c.to_json() for c in self.components],
                "coefficients": list(self.coefficients)}


WeightSpec = Union[ConstantWeight, ArcSetWeight, SeriesWeight]


def log_weight(v: WeightSpec, z: complex) -> float:
    """log v(z) for 0 < |z| < 1 (no underflow)."""
    r = abs(z)
    if not 0 < r < 1:
        raise ValueError("weights are evaluated at 0 < |z| < 1")
    if isinstance(v, ConstantWeight):
        return math.log(v.c)
    if isinstance(v, ArcSetWeight):
        return -v.distance(z / r) / (1 - r)
    logs = [math.log(a) + log_weight(c, z) for a, c in zip(v.coefficients, v.components)]
    top = max(logs)
    return top + math.log(sum(math.exp(x - top) for x in logs))


def weight_eval(v: WeightSpec, z: complex) -> float:
    return math.exp(log_weight(v, z))


def arc_set_distance(a: ArcSetWeight, b: ArcSetWeight, samples: int = 0) -> float:
    """Chordal distance between two arc sets (0 if they meet)."""
    best = math.pi
    for x in a.arcs:
        for y in b.arcs:
            off = abs(_wrap(x.center - y.center))
            best = min(best, max(0.0, off - x.half_width - y.half_width))
    return chord(best)


def auto_coefficients(gammas: Sequence[ArcSetWeight], complements: Sequence[ArcSetWeight],
                      truncation: int | None = None) -> List[float]:
    """a_k = 2^{-k} prod_{j=0}^{k} (d_{k,j}/2)^6 with d_{k,j} = dist(Gamma_k, C_j).

    Only the complement pieces that are supplied enter the product
    (j <= min(k, len(complements) - 1)).
    """
    K = len(gammas) if truncation is None else min(truncation, len(gammas))
    out = []
    for k in range(K):
        a = 2.0 ** (-k)
        for j in range(min(k, len(complements) - 1) + 1):
            d = arc_set_distance(gammas[k], complements[j])
            if d <= 0:
                raise NonDisjoint(f"Gamma_{k} meets C_{j}")
            a *= (d / 2) ** 6
        out.append(a)
    return out


def auto_coefficients_from_distances(dist: Sequence[Sequence[float]]) -> List[float]:
    """Same formula from a table dist[k][j] (j <= k)."""
    out = []
    for k, row in enumerate(dist):
        a = 2.0 ** (-k)
        for j in range(k + 1):
            if row[j] <= 0:
                raise NonDisjoint(f"d_{k},{j} = 0")
            a *= (row[j] / 2) ** 6
        out.append(a)
    return out


def weight_from_json(obj) -> WeightSpec:
    kind = obj.get("type")
    unit = math.pi if obj.get("unit") == "pi" else 1.0

    def arcs(items, u):
        return ArcSetWeight(tuple(Arc(float(a["center"]) * u, float(a["half_width"]) * u) for a in items))

    if kind == "constant":
        return ConstantWeight(float(obj.get("c", 1.0)))
    if kind == "arcs":
        return arcs(obj["arcs"], unit)
    if kind in ("series", "series_auto"):
        comps = [arcs(c["arcs"], math.pi if c.get("unit", obj.get("unit")) == "pi" else 1.0)
                 for c in obj["components"]]
        if kind == "series":
            return SeriesWeight(tuple(comps), tuple(obj["coefficients"]))
        comp = [arcs(c["arcs"], math.pi if c.get("unit", obj.get("unit")) == "pi" else 1.0)
                for c in obj["complements"]]
        return SeriesWeight(tuple(comps), tuple(auto_coefficients(comps, comp, obj.get("truncation"))))
    raise ValueError(f"unknown weight type {kind!r}")
