import math

import pytest

from jointcyc.numeric.diagnostics import (BOUNDED, DIVERGENT, INCONCLUSIVE, NonConvergent, boundary_grid,
                                          classify_point, classify_slope, gamma_distance, log_slope,
                                          reciprocal_norm, scan)
from jointcyc.numeric.gram import WeightedSpace
from jointcyc.numeric.quadrature import QuadratureGrid
from jointcyc.numeric.weights import Arc, ArcSetWeight, ConstantWeight

BERGMAN = WeightedSpace(ConstantWeight(1.0), 0)
ARC = WeightedSpace(ArcSetWeight((Arc(0.0, math.pi / 4),)), 2)
SHORT = (8, 12, 16, 20, 24)


def test_slope_fit_uses_top_half():
    ns = [10, 20, 40, 80]
    assert log_slope(ns, [1, 1, 4, 16]) == pytest.approx(2)
    assert classify_slope(0.1) == BOUNDED and classify_slope(2.0) == DIVERGENT
    assert classify_slope(0.5) == INCONCLUSIVE


def test_bergman_boundary_point_diverges():
    d = classify_point(BERGMAN, 1, (10, 20, 30, 40))
    assert d.classification == DIVERGENT
    assert d.slope == pytest.approx(2, abs=0.15)
    assert [v for _, v in d.samples] == pytest.approx([(n + 1) * (n + 2) / 2 for n in (10, 20, 30, 40)])


def test_classify_point_requires_unimodular_point():
    with pytest.raises(ValueError):
        classify_point(BERGMAN, 0.5, SHORT)
    with pytest.raises(ValueError):
        classify_point(BERGMAN, 1, (20, 10))


def test_arc_weight_small_schedule():
    grid = QuadratureGrid(digits=40)
    assert classify_point(ARC, 1, SHORT, grid).classification == BOUNDED
    assert classify_point(ARC, -1, SHORT, grid).classification == DIVERGENT


def test_reciprocal_norm_examples():
    r = reciprocal_norm(ARC, -1)
    assert r.finite and r.ratio is not None and 0 < r.ratio < 1e3
    assert reciprocal_norm(ARC, 1).finite is False
    with pytest.raises(NonConvergent):
        reciprocal_norm(ARC, complex(math.cos(0.3), math.sin(0.3)), strict=True)
    c = reciprocal_norm(BERGMAN, 2)
    # 1/(z-2)^3 = -(1/8) sum_k C(k+2, 2) (z/2)^k and ||z^k||^2 = 1/(k+1)
    series = sum(((k + 1) * (k + 2) / 2) ** 2 / 4 ** k / (k + 1) for k in range(400)) / 64
    assert c.finite and c.value == pytest.approx(series, rel=1e-8)
    assert series == pytest.approx(1 / 18, rel=1e-12)


def test_reciprocal_ratio_bounded_off_gamma():
    ratios = []
    for theta in (1.0, 1.5, 2.0, 2.5, math.pi):
        w = complex(math.cos(theta), math.sin(theta))
        r = reciprocal_norm(ARC, w)
        assert r.finite
        ratios.append(r.ratio)
    assert max(ratios) < 1e3


def test_gamma_distance():
    assert gamma_distance(ARC.weight, -1) == pytest.approx(abs(-1 - complex(math.cos(math.pi / 4), math.sin(math.pi / 4))))
    assert gamma_distance(ARC.weight, 2) == pytest.approx(1)
    assert gamma_distance(BERGMAN.weight, 2) is None


def test_scan_is_thread_count_independent():
    grid = QuadratureGrid(digits=40)
    pts = boundary_grid(8)
    a = scan(ARC, pts, SHORT, grid, threads=1)
    b = scan(ARC, pts, SHORT, grid, threads=4)
    assert a.csv_text() == b.csv_text()
    assert a.summary() == b.summary()
    assert a.csv_text().splitlines()[0] == "w_re,w_im,N,lambda_N,delta_N,condition"
