import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointcyc.poly import parse
from jointcyc.univariate import (approximate_roots, certified_roots, disk_zero_test, from_coefficients,
                                 unimodular_root_count)


def U(s):
    return parse(s, 1)


@pytest.mark.parametrize("text, count", [
    ("z - 1", 1), ("z^2 + 1", 2), ("(z - 2)*(2z - 1)", 0), ("z + 1", 1), ("z^3 - 1", 3),
    ("(z - 1)^2", 1), ("z - 1/2", 0), ("z^2 - z + 1", 2), ("5z^2 - 6z + 5", 2),
])
def test_unimodular_root_count(text, count):
    assert unimodular_root_count(U(text)) == count


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=2, max_size=6).filter(lambda c: c[-1] != 0))
def test_unimodular_count_matches_numpy(cs):
    p = from_coefficients(cs)
    roots = np.roots(list(reversed(cs)))
    near = [r for r in roots if abs(abs(r) - 1) < 1e-6]
    far = [r for r in roots if abs(abs(r) - 1) > 1e-3]
    if len(near) + len(far) != len(roots):
        return  # too close to call numerically
    distinct = []
    for r in near:
        if all(abs(r - s) > 1e-4 for s in distinct):
            distinct.append(r)
    assert unimodular_root_count(p) == len(distinct)


def test_certified_roots_enclose_the_roots():
    p = U("(z - 2)*(2z - 1)*(z^2 + 1)")
    disks = certified_roots(p)
    assert disks is not None and len(disks) == 4
    for true in (2, 0.5, 1j, -1j):
        assert any(abs(complex(d.center) - true) <= float(d.radius) + 1e-30 for d in disks)


def test_disk_zero_test():
    assert disk_zero_test(U("z - 1"), closed=False).status == "zero_free"
    assert disk_zero_test(U("z - 1"), closed=True).status == "zero"
    assert disk_zero_test(U("2z - 1"), closed=False).status == "zero"
    assert disk_zero_test(U("z^2 + 4"), closed=True).status == "zero_free"


def test_approximate_roots_near_degenerate():
    p = U("(z - 1)*(z - 1 - 1/1000000)*(z + 3)")
    rs = sorted(approximate_roots(p, 40), key=lambda r: r.real)
    assert rs[0] == pytest.approx(-3)
    assert rs[1].real == pytest.approx(1, abs=1e-9) and rs[2].real == pytest.approx(1 + 1e-6, abs=1e-9)
