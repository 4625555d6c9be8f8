import math
import random

import numpy as np
import pytest

from jointcyc.numeric.gram import (PrecisionLoss, WeightedSpace, delta_profile, dist_to_invariant_subspace,
                                   gram_matrix, lambda_N, lambda_profile, truncated_functional)
from jointcyc.numeric.quadrature import QuadratureGrid, moment_table
from jointcyc.numeric.weights import Arc, ArcSetWeight, ConstantWeight, SeriesWeight

BERGMAN = WeightedSpace(ConstantWeight(1.0), 0)
ARC = WeightedSpace(ArcSetWeight((Arc(0.0, math.pi / 4),)), 2)


def _c(x):
    return complex(float(x.real.mid()), float(x.imag.mid()))


def test_radial_rule_exactness():
    assert QuadratureGrid().exactness_error(60) < 1e-12
    assert QuadratureGrid(digits=30).exactness_error(40) < 1e-12


def test_bergman_gram_is_diagonal():
    G = gram_matrix(BERGMAN, 20)
    for j in range(21):
        for k in range(21):
            want = 1 / (k + 1) if j == k else 0
            assert abs(_c(G.entries[j][k]) - want) < 1e-15


def test_first_order_gram_diagonal():
    G = gram_matrix(WeightedSpace(ConstantWeight(1.0), 1), 12)
    assert G.diagonal()[0] == pytest.approx(1)
    for k in range(1, 13):
        assert G.diagonal()[k] == pytest.approx(1 / (k + 1) + k, rel=1e-14)


def test_arc_gram_hermitian_positive_definite():
    G = gram_matrix(ARC, 16)
    A = np.array([[_c(x) for x in row] for row in G.entries])
    assert np.allclose(A, A.conj().T, rtol=0, atol=1e-14)
    np.linalg.cholesky(A)
    assert all(d > 0 for d in G.diagonal()) and all(p > 0 for p in G.pivots)


def test_series_gram_is_linear_in_the_weight():
    g0, g1 = ArcSetWeight((Arc(0.0, 0.5),)), ArcSetWeight((Arc(2.0, 0.3),))
    grid = QuadratureGrid(digits=30)
    s = moment_table(SeriesWeight((g0, g1), (1.0, 0.25)), 8, 4, grid)
    a, b = moment_table(g0, 8, 4, grid), moment_table(g1, 8, 4, grid)
    for part in (0, 1):
        for i in range(9):
            for l in range(5):
                x = float(s[part][i][l].mid())
                y = float((a[part][i][l] + 0.25 * b[part][i][l]).mid())
                assert x == pytest.approx(y, rel=1e-14, abs=1e-30)


def test_bergman_lambda_closed_forms():
    G = gram_matrix(BERGMAN, 60)
    for N in (0, 10, 60):
        assert lambda_N(G, 0, N) == pytest.approx(1, rel=1e-14)
        assert lambda_N(G, 1, N) == pytest.approx((N + 1) * (N + 2) / 2, rel=1e-8)
        series = sum((k + 1) * 2.0 ** -k for k in range(N + 1))
        assert lambda_N(G, 2 ** -0.5, N) == pytest.approx(series, rel=1e-6)
    assert lambda_N(G, 2 ** -0.5 * 1j) == pytest.approx(4, rel=1e-6)


def test_lambda_lower_bound_and_monotone():
    G = gram_matrix(ARC, 40)
    for w in (1, -1, 1j, 0.3 - 0.2j):
        prof = lambda_profile(G, w)
        assert prof[0] == pytest.approx(1 / G.diagonal()[0], rel=1e-12)
        assert all(b >= a * (1 - 1e-12) for a, b in zip(prof, prof[1:]))


def test_delta_examples():
    G = gram_matrix(BERGMAN, 1)
    assert delta_profile(G, 0)[0] == pytest.approx(1, rel=1e-14)
    assert dist_to_invariant_subspace(BERGMAN, 0, 1) == pytest.approx(1, rel=1e-14)
    d = delta_profile(gram_matrix(ARC, 30), -1)
    assert all(b <= a for a, b in zip(d, d[1:]))


def test_delta_and_lambda_are_dual_inside_the_disk():
    # for |w| < 1 the distance from 1 to [z - w] is 1/sqrt(lambda_inf); at finite N they bracket
    G = gram_matrix(BERGMAN, 60)
    w = 0.5
    lam = lambda_profile(G, w)[-1]
    assert delta_profile(G, w)[-1] == pytest.approx(1 / math.sqrt(lam), rel=1e-6)


def test_truncated_multiplicativity():
    G = gram_matrix(ARC, 30)
    rng = random.Random(2)
    for w in (1, complex(math.cos(0.5), math.sin(0.5))):
        for _ in range(5):
            p = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(6)]
            q = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(10)]
            pq = list(np.convolve(p, q))
            pw = sum(c * w ** k for k, c in enumerate(p))
            lhs = truncated_functional(G, w, pq)
            rhs = pw * truncated_functional(G, w, q)
            assert abs(lhs - rhs) <= 1e-8 * max(1, abs(rhs))


def test_monomial_norm_growth():
    for n in (0, 1, 2):
        G = gram_matrix(WeightedSpace(ConstantWeight(1.0), n), 60, QuadratureGrid(digits=40))
        ks = np.arange(20, 61)
        slope = np.polyfit(np.log(ks), np.log([G.diagonal()[k] for k in ks]), 1)[0]
        assert abs(slope - (2 * n - 1)) <= 0.15


def test_precision_loss_is_reported():
    with pytest.raises(PrecisionLoss):
        gram_matrix(WeightedSpace(ConstantWeight(1.0), 3), 60, QuadratureGrid(digits=12))
