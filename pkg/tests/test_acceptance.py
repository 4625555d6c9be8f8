"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""
import math
import random
import sys
import time
from fractions import Fraction

import pytest

from jointcyc.ideal import IllConditioned, buchberger, codimension, factor_ideal, solve_variety
from jointcyc.numeric.diagnostics import (BOUNDED, DIVERGENT, INCONCLUSIVE, boundary_grid, classify_point,
                                          scan)
from jointcyc.numeric.gram import WeightedSpace, gram_matrix, lambda_profile, truncated_functional
from jointcyc.numeric.quadrature import QuadratureGrid
from jointcyc.numeric.weights import (Arc, ArcSetWeight, ConstantWeight, NonDisjoint, SeriesWeight,
                                      auto_coefficients, auto_coefficients_from_distances)
from jointcyc.poly import GaussianRational, MultiPolynomial, gcd_many, parse
from jointcyc.spaces import DirichletType, Hardy, is_cyclic, is_jointly_cyclic

from oracles import arc_weight_gram, lambda_lu
from strategies import random_poly

SCHEDULE = (10, 20, 30, 40, 50, 60)
GRID70 = QuadratureGrid(digits=70)
ARC_SPACE = WeightedSpace(ArcSetWeight((Arc(0.0, math.pi / 4),)), 2)
RATIO_THRESHOLD = 1e2      # lambda_60(outside) / lambda_60(inside), locked against the oracle below
GROWTH_THRESHOLD = 10.0   # criterion 7: gap/arc ratio growth, N = 30 (oracle) to N = 60
ORACLE_RTOL = 1e-6         # agreement of the main route with the oracle at N = 30


def report(number, ok, detail, capsys=None):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok


def P(s, d=2):
    return parse(s, d)


# ---------------------------------------------------------------------------


def criterion_1():
    cases = []
    for t, want in (("3/5", "NotCyclic"), ("3/4", "NotCyclic"), ("1", "NotCyclic"),
                    ("1/4", "Cyclic"), ("1/2", "Cyclic")):
        cases.append((f"1-z1z2 in D_{t}", lambda t=t: is_cyclic(DirichletType(Fraction(t), 2), P("1-z1*z2")).status,
                      want))
    cases.append(("{z1-1,z2-1} in H2", lambda: is_jointly_cyclic(Hardy(2, 2), [P("z1-1"), P("z2-1")]).status,
                  "JointlyCyclic"))
    cases.append(("{z1-1,z2-1} in D_2", lambda: is_jointly_cyclic(DirichletType(2, 2), [P("z1-1"), P("z2-1")]).status,
                  "NotJointlyCyclic"))

    def f00():
        spaces = [Hardy(2, 2), Hardy(1, 2), Hardy(math.inf, 2)] + [DirichletType(Fraction(t), 2) for t in
                                                                   ("1/4", "1/2", "3/4", "1", "2")]
        return {is_jointly_cyclic(s, [P("z1"), P("z2")]).status for s in spaces}

    cases.append(("F_(0,0) in every supported space", lambda: f00(), {"NotJointlyCyclic"}))
    bad, slowest = [], 0.0
    for name, fn, want in cases:
        t0 = time.perf_counter()
        got = fn()
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        if got != want or dt >= 1.0:
            bad.append(f"{name}: {got} ({dt:.2f} s)")
    return not bad, f"{len(cases) - len(bad)}/{len(cases)} cases, slowest {slowest:.2f} s" + (
        f"; failures {bad}" if bad else "")


def criterion_2():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    problems = []
    for _ in range(50):
        w = [GaussianRational(Fraction(rng.randint(-9, 9), rng.randint(1, 9)),
                              Fraction(rng.randint(-9, 9), rng.randint(1, 9))) for _ in range(2)]
        G = buchberger([MultiPolynomial.variable(2, j + 1) - w[j] for j in range(2)])
        if codimension(G).count != 1:
            problems.append(f"codim I(F_w) != 1 at {w}")
    if not codimension(buchberger([P("z1", 3), P("z2", 3)])).infinite:
        problems.append("<z1, z2> in P_3 not infinite")
    families = 0
    max_res = 0.0
    while families < 200:
        fam = [random_poly(rng, degree=rng.randint(1, 3), nterms=rng.randint(2, 4))
               for _ in range(rng.randint(2, 3))]
        if not gcd_many(fam).is_constant():
            continue
        families += 1
        G = buchberger(fam)
        Q = codimension(G)
        if Q.infinite:
            problems.append(f"infinite codimension for gcd-1 family {fam}")
            continue
        if G.is_unit():
            continue
        try:
            sol = solve_variety(G)
        except IllConditioned as exc:
            problems.append(f"solve_variety ill-conditioned: {exc}")
            continue
        if sum(p.multiplicity for p in sol.points) > Q.count:
            problems.append("more points than the codimension")
        for p in sol.points:
            max_res = max(max_res, p.residual)
            if not p.residual < 1e-9:
                problems.append(f"residual {p.residual}")
    dt = time.perf_counter() - t0
    if dt >= 60:
        problems.append(f"runtime {dt:.1f} s")
    return not problems, f"50 maximal ideals, 200 gcd-1 families, max residual {max_res:.1e}, {dt:.1f} s" + (
        f"; problems {problems[:3]}" if problems else "")


def criterion_3():
    G = gram_matrix(WeightedSpace(ConstantWeight(1.0), 0), 60, GRID70)
    diag = max(abs(d * (k + 1) - 1) for k, d in enumerate(G.diagonal()))
    half = lambda_profile(G, 2 ** -0.5)
    one = lambda_profile(G, 1)
    e_half = max(abs(half[N] / sum((k + 1) * 2.0 ** -k for k in range(N + 1)) - 1) for N in range(61))
    e_one = max(abs(one[N] / ((N + 1) * (N + 2) / 2) - 1) for N in range(61))
    ok = diag < 1e-10 and e_half < 1e-6 and e_one < 1e-8
    return ok, f"diag rel err {diag:.1e}, lambda(1/sqrt2) {e_half:.1e}, lambda(1) {e_one:.1e}"


def _oracle_check(components, coefficients, points, main_gram):
    """Compare lambda_30 from the main route with the independent oracle."""
    import numpy as np
    G = sum(a * arc_weight_gram(c, 2, 30) for a, c in zip(coefficients, components))
    worst, oracle_vals = 0.0, []
    for w in points:
        ref = lambda_lu(np.asarray(G), w)
        ours = lambda_profile(main_gram, w)[30]
        worst = max(worst, abs(ours / ref - 1))
        oracle_vals.append(ref)
    return worst, oracle_vals


def criterion_4():
    t0 = time.perf_counter()
    inside = classify_point(ARC_SPACE, 1, SCHEDULE, GRID70)
    outside = classify_point(ARC_SPACE, -1, SCHEDULE, GRID70)
    ratio = outside.samples[-1][1] / inside.samples[-1][1]
    gm = gram_matrix(ARC_SPACE, 60, GRID70)
    worst, (o_in, o_out) = _oracle_check([[(0.0, math.pi / 4)]], [1.0], [1, -1], gm)
    dt = time.perf_counter() - t0
    ok = (inside.classification == BOUNDED and outside.classification == DIVERGENT
          and ratio >= RATIO_THRESHOLD and worst < ORACLE_RTOL and o_out / o_in >= RATIO_THRESHOLD and dt < 600)
    return ok, (f"w=1 {inside.classification} (slope {inside.slope:.3f}), w=-1 {outside.classification} "
                f"(slope {outside.slope:.2f}), ratio {ratio:.3g}, oracle N=30 rel diff {worst:.1e} "
                f"(oracle ratio {o_out / o_in:.3g}), {dt:.0f} s")


_SCAN = {}


def _arc_scan():
    if "res" not in _SCAN:
        _SCAN["res"] = scan(ARC_SPACE, boundary_grid(24), SCHEDULE, GRID70)
    return _SCAN["res"]


def criterion_5():
    res = _arc_scan()
    disagree = []
    incon = 0
    for w, a, b in zip(res.points, res.lambdas, res.deltas):
        if a.classification == INCONCLUSIVE:
            incon += 1
        if INCONCLUSIVE in (a.classification, b.classification):
            if a.classification != b.classification and INCONCLUSIVE not in (a.classification, b.classification):
                disagree.append(w)
            continue
        if a.classification != b.classification:
            disagree.append(w)
    frac = incon / len(res.points)
    return not disagree and frac <= 0.25, f"{len(disagree)} disagreements, Inconclusive fraction {frac:.3f}"


def criterion_6():
    rng = random.Random(6)
    spaces = [Hardy(2, 2), DirichletType(Fraction(1, 4), 2), DirichletType(Fraction(3, 4), 2),
              DirichletType(1, 2), DirichletType(2, 2)]
    mismatches = 0
    for _ in range(1000):
        fam = [random_poly(rng) for _ in range(2)]
        sp = rng.choice(spaces)
        base = is_jointly_cyclic(sp, fam).status
        c = GaussianRational(Fraction(rng.randint(1, 6), rng.randint(1, 3)), Fraction(rng.randint(-3, 3)))
        k = rng.randrange(2)
        scaled = list(fam)
        scaled[k] = fam[k].scale(c)
        combo = fam[0] * random_poly(rng, nterms=2) + fam[1] * random_poly(rng, nterms=2)
        if is_jointly_cyclic(sp, scaled).status != base or is_jointly_cyclic(sp, fam + [combo]).status != base:
            mismatches += 1
    res = _arc_scan()
    gm = res.gram
    mono_bad = 0
    for w in res.points:
        prof = lambda_profile(gm, w)
        tol = max(1e-12, gm.condition_estimate() * 10.0 ** (-gm.digits + 2))
        mono_bad += sum(1 for a, b in zip(prof, prof[1:]) if b < a * (1 - tol))
    mult_err = 0.0
    for w, d in zip(res.points, res.lambdas):
        if d.classification != BOUNDED:
            continue
        for _ in range(3):
            p = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(rng.randint(1, 20))]
            q = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(rng.randint(1, 61 - len(p)))]
            pq = [sum(p[i] * q[k - i] for i in range(len(p)) if 0 <= k - i < len(q))
                  for k in range(len(p) + len(q) - 1)]
            pw = sum(c * w ** k for k, c in enumerate(p))
            lhs = truncated_functional(gm, w, pq)
            rhs = pw * truncated_functional(gm, w, q)
            mult_err = max(mult_err, abs(lhs - rhs) / max(1.0, abs(rhs)))
    ok = mismatches == 0 and mono_bad == 0 and mult_err <= 1e-8
    return ok, (f"1000 trials, {mismatches} verdict changes; {mono_bad} monotonicity violations; "
                f"multiplicativity err {mult_err:.1e}")


def two_arc_series():
    g0 = ArcSetWeight((Arc(0.0, math.pi / 6),))
    g1 = ArcSetWeight((Arc(math.pi, math.pi / 6),))
    c0 = ArcSetWeight((Arc(math.pi / 2, math.pi / 6),))
    c1 = ArcSetWeight((Arc(-math.pi / 2, math.pi / 6),))
    a = auto_coefficients([g0, g1], [c0, c1])
    return SeriesWeight((g0, g1), tuple(a)), a


def criterion_7():
    problems = []
    if auto_coefficients_from_distances([[2.0]]) != [1.0]:
        problems.append("a_0 != 1 for d_00 = 2")
    rng = random.Random(77)
    configs = 0
    while configs < 20:
        K = rng.randint(3, 40)
        gammas, comps = [], []
        for _ in range(K):
            c = rng.uniform(-math.pi, math.pi)
            gammas.append(ArcSetWeight((Arc(c, rng.uniform(0, 0.4)),)))
            comps.append(ArcSetWeight((Arc(c + math.pi + rng.uniform(-0.5, 0.5), rng.uniform(0, 0.4)),)))
        try:
            a = auto_coefficients(gammas, comps)
        except NonDisjoint:
            continue
        configs += 1
        # each a_k <= 2^{-k} since every factor (d/2)^6 <= 1, so the series is dominated by sum 2^{-k}
        if not all(0 < x <= 2.0 ** -k for k, x in enumerate(a)) or not sum(a) <= 2:
            problems.append("summability bound violated")
    weight, coeffs = two_arc_series()
    space = WeightedSpace(weight, 2)
    mids = {"arc 0": 1, "arc pi": -1, "gap pi/2": 1j}
    diag = {k: classify_point(space, w, SCHEDULE, GRID70) for k, w in mids.items()}
    if diag["arc 0"].classification != BOUNDED or diag["arc pi"].classification != BOUNDED:
        problems.append("arc midpoint not Bounded")
    if diag["gap pi/2"].classification != DIVERGENT:
        problems.append("gap midpoint not Divergent")
    worst, (o0, opi, ogap) = _oracle_check([[(0.0, math.pi / 6)], [(math.pi, math.pi / 6)]], coeffs,
                                           [1, -1, 1j], gram_matrix(space, 60, GRID70))
    if worst >= ORACLE_RTOL:
        problems.append(f"oracle disagreement {worst:.1e}")
    # the arcs carry very different coefficients, so the fixed 1e2 of criterion 4 cannot be locked
    # against the weaker arc at N = 30; lock instead a growth factor of the gap/arc ratio from the
    # oracle value at N = 30 to the main value at N = 60
    lam60 = {k: d.samples[-1][1] for k, d in diag.items()}
    ratios = []
    for arc, ref in (("arc 0", o0), ("arc pi", opi)):
        r60 = lam60["gap pi/2"] / lam60[arc]
        ratios.append(r60)
        if r60 < GROWTH_THRESHOLD * ogap / ref:
            problems.append(f"gap/{arc} ratio {r60:.3g} below {GROWTH_THRESHOLD * ogap / ref:.3g}")
    ratio = min(ratios)
    detail = ", ".join(f"{k} {d.classification}" for k, d in diag.items())
    return not problems, f"{detail}; min gap/arc ratio {ratio:.3g}; oracle rel diff {worst:.1e}" + (
        f"; problems {problems}" if problems else "")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


@pytest.mark.parametrize("number", range(1, 8))
def test_criterion(number, capsys):
    ok, detail = CRITERIA[number - 1]()
    assert report(number, ok, detail, capsys), detail


if __name__ == "__main__":
    results = [report(k, *fn()) for k, fn in enumerate(CRITERIA, 1)]
    sys.exit(0 if all(results) else 1)
