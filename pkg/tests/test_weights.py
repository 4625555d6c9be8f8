import math
import random

import pytest

from jointcyc.numeric.weights import (Arc, ArcSetWeight, ConstantWeight, NonDisjoint, SeriesWeight,
                                      auto_coefficients, auto_coefficients_from_distances, log_weight,
                                      weight_eval, weight_from_json)

QUARTER = ArcSetWeight((Arc(0.0, math.pi / 4),))


def test_weight_examples():
    assert weight_eval(ConstantWeight(1.0), 0.3 + 0.2j) == 1.0
    assert weight_eval(ArcSetWeight((Arc(0.0, math.pi),)), -0.9) == 1.0
    point = ArcSetWeight((Arc(0.0, 0.0),))
    for r in (0.1, 0.5, 0.9):
        assert weight_eval(point, -r) == pytest.approx(math.exp(-2 / (1 - r)), rel=1e-14)
    with pytest.raises(ValueError):
        weight_eval(QUARTER, 0)


def test_distance_is_chordal():
    assert QUARTER.distance(1j) == pytest.approx(2 * math.sin(math.pi / 8))
    assert QUARTER.distance(complex(math.cos(0.5), math.sin(0.5))) == 0


def test_auto_coefficient_examples():
    assert auto_coefficients_from_distances([[2.0]]) == [1.0]
    assert auto_coefficients_from_distances([[1.0]]) == [1 / 64]
    assert auto_coefficients_from_distances([[2.0], [2.0, 2.0]])[1] == 0.5
    with pytest.raises(NonDisjoint):
        auto_coefficients_from_distances([[0.0]])
    with pytest.raises(NonDisjoint):
        auto_coefficients([QUARTER], [ArcSetWeight((Arc(0.5, 0.4),))])


def test_pieces_merge_and_wrap():
    arcs, gaps = QUARTER.pieces()
    assert arcs == [(-math.pi / 4, math.pi / 4)]
    assert gaps[0] == pytest.approx((math.pi / 4, 7 * math.pi / 4))
    w = ArcSetWeight((Arc(0.0, 0.1), Arc(math.pi, 0.3), Arc(0.15, 0.1)))
    arcs, gaps = w.pieces()
    assert len(arcs) == 2 and len(gaps) == 2
    total = sum(e - s for s, e in arcs) + sum(e - s for s, e in gaps)
    assert total == pytest.approx(2 * math.pi)
    assert ArcSetWeight((Arc(0.0, 2.0), Arc(3.0, 2.0))).pieces() == ([(-math.pi, math.pi)], [])


def _random_weight(rng):
    arcs = tuple(Arc(rng.uniform(-math.pi, math.pi), rng.uniform(0, 0.6)) for _ in range(rng.randint(1, 3)))
    if rng.random() < 0.5:
        return ArcSetWeight(arcs)
    comps = tuple(ArcSetWeight((a,)) for a in arcs)
    return SeriesWeight(comps, tuple(2.0 ** -k for k in range(len(comps))))


def test_weight_positivity_and_radial_monotonicity():
    rng = random.Random(0)
    weights = [ConstantWeight(0.5)] + [_random_weight(rng) for _ in range(20)]
    for _ in range(10_000):
        v = rng.choice(weights)
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        if not 0 < abs(z) < 1:
            continue
        r = rng.uniform(0.01, 0.99)
        # radial monotonicity: v(z) <= v(rz)
        assert log_weight(v, z) <= log_weight(v, r * z) + 1e-12
        # positivity on |z| <= rho with an explicit floor
        rho = abs(z)
        floor = -2 / (1 - rho) + (math.log(min(v.coefficients)) if isinstance(v, SeriesWeight) else 0) \
            + (math.log(v.c) if isinstance(v, ConstantWeight) else 0)
        assert log_weight(v, z) >= floor - 1e-12


def test_series_coefficients_summable():
    rng = random.Random(7)
    for _ in range(20):
        gammas, comps = [], []
        for k in range(30):
            c = rng.uniform(-math.pi, math.pi)
            gammas.append(ArcSetWeight((Arc(c, rng.uniform(0, 0.3)),)))
            comps.append(ArcSetWeight((Arc(c + math.pi, rng.uniform(0, 0.3)),)))
        try:
            a = auto_coefficients(gammas, comps)
        except NonDisjoint:
            continue
        assert all(x > 0 for x in a)
        assert sum(a) <= 2.0


def test_weight_from_json():
    w = weight_from_json({"type": "arcs", "unit": "pi", "arcs": [{"center": 0, "half_width": 0.25}]})
    assert w == QUARTER
    s = weight_from_json({"type": "series_auto", "components": [{"arcs": [{"center": 0, "half_width": 0.1}]}],
                          "complements": [{"arcs": [{"center": 3.14159, "half_width": 0.1}]}]})
    assert isinstance(s, SeriesWeight) and 0 < s.coefficients[0] <= 1
    with pytest.raises(ValueError):
        weight_from_json({"type": "gaussian"})
