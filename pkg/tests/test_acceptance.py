"""Acceptance criteria 1-8, one PASS/FAIL line each.

Run with pytest (lines appear in the terminal summary) or directly:
    python3 tests/test_acceptance.py
"""
import itertools
import sys
import time


from artifact.chars import CharTable
from artifact.curve import EllipticCurve, one_point_curve
from artifact.ehall import Tower, is_normal
from artifact.heckegraph import (HeckePipeline, decomposable_closed_form, gaussian_binomial,
                                 rank2_closed_form, rank2_item, rank3_closed_form,
                                 stable_closed_form)
from artifact.scalars import CycloScalar, RationalFunctionV as R, eval_at_curve, vpow
from artifact.sheaves import CoherentSheaf, IndecompSheaf, bundles_in_window, path_of, polygon_contains
from artifact.symfunc import SymFunc, mult_torsion_same_point

RESULTS = {}
RANK3_CURVE = (0, 0, 1, 0, 0)  # y^2 + y = x^3 over F_2
_pipes = {}


def pipe(curve):
    key = (curve.q, tuple(curve.raw_coeffs))
    if key not in _pipes:
        _pipes[key] = HeckePipeline(curve)
    return _pipes[key]


# pipelines of the criterion 1 and 3 runs, kept for the integrality audit
RUNS = {}


def record(k, ok, detail):
    RESULTS[k] = (ok, detail)
    return ok


def _integral(P):
    """Every coefficient the pipeline extracted: even in v and a nonnegative integer."""
    bad = 0
    count = 0
    for (x, r, E, _), prod in P._prod.items():
        for F, c in prod.items():
            s = c * vpow(-E.rank * r * x.degree)
            count += 1
            if s.substitute_neg() != s:
                bad += 1
                continue
            val = eval_at_curve(s, P.curve.q)
            if val.denominator != 1 or val < 0:
                bad += 1
    return count, bad


# 1
def test_criterion_1_rank2_graph():
    parts, fails = [], []
    for q in (2, 3, 4):
        X = one_point_curve(q)
        P = HeckePipeline(X)
        RUNS.setdefault(1, []).append(P)
        x = X.base_closed_point
        t = time.perf_counter()
        nv = 0
        for E in bundles_in_window(X, 2, -3, 3):
            nv += 1
            got = {e.target: e.multiplicity for e in P.neighborhood(E, x, 1)}
            want = rank2_closed_form(X, E)
            if got != want:
                fails.append(("q=%d item %d" % (q, rank2_item(E)), "%s: got %s want %s" % (
                    E, sorted(got.values()), sorted(want.values()))))
        dt = time.perf_counter() - t
        if dt >= 60:
            fails.append(("q=%d" % q, "took %.1fs" % dt))
        parts.append("q=%d %d vertices %.1fs" % (q, nv, dt))
    detail = "; ".join(parts)
    if fails:
        groups = {}
        for k, _ in fails:
            groups[k] = groups.get(k, 0) + 1
        detail += "; mismatched sources: " + ", ".join("%s x%d" % kv for kv in sorted(groups.items()))
    ok = record(1, not fails, detail)
    assert ok, "\n".join("%s %s" % f for f in fails)


# 2
def test_criterion_2_sum_rule():
    runs = 0
    plan = [(one_point_curve(q), n, lo, hi) for q in (2, 3, 4) for n, lo, hi in ((2, -2, 2), (3, 0, 1))]
    plan.append((EllipticCurve(2, RANK3_CURVE), 2, -1, 1))
    plan.append((EllipticCurve(2, RANK3_CURVE), 3, 0, 0))
    for X, n, lo, hi in plan:
        P = pipe(X)
        xs = X.closed_points_of_degree(1)[:2] + X.closed_points_of_degree(2)[:1] * (n == 2)
        for x in xs:
            for r in range(1, n + 1):
                want = gaussian_binomial(n, r, X.q ** x.degree)
                for E in bundles_in_window(X, n, lo, hi):
                    # neighborhood() raises on a violated sum rule; recheck anyway
                    assert sum(e.multiplicity for e in P.neighborhood(E, x, r)) == want
                    runs += 1
    record(2, True, "%d neighborhoods, n in {2,3}, r = 1..n" % runs)


# 3
def test_criterion_3_rank3_constants():
    X = EllipticCurve(2, RANK3_CURVE)
    P = HeckePipeline(X)
    RUNS[3] = [P]
    t = time.perf_counter()
    seen = set()
    ok = True
    ones = X.closed_points_of_degree(1)
    for x in ones:
        for xp in ones:
            E = CoherentSheaf([IndecompSheaf(3, 2, xp, 1)])
            got = P.incoming(E, x, 1)
            ok &= got == rank3_closed_form(X, x, xp, 2)
            seen.update(got.values())
    dt = time.perf_counter() - t
    ok &= seen == {7, 4, 3, 2, 1} and dt < 120
    record(3, ok, "constants %s, point conditions %s, %.1fs" % (
        sorted(seen, reverse=True), "match" if ok else "differ", dt))
    assert ok


# 4
def test_criterion_4_stable():
    checked = 0
    for X in (EllipticCurve(2, RANK3_CURVE), one_point_curve(3)):
        P = pipe(X)
        for x in X.closed_points_of_degree(1):
            for n in (2, 3):
                for y in X.closed_points_of_degree(n):
                    for k in (-1, 1, 2):
                        E = CoherentSheaf([IndecompSheaf(n, k * n, y, 1)])
                        got = P.incoming(E, x, 1)
                        assert len(got) == 1 and list(got.values()) == [1]
                        assert got == stable_closed_form(X, E, x)
                        checked += 1
    record(4, True, "%d stable bundles, one neighbor each" % checked)


# 5
def test_criterion_5_decomposable():
    checked = 0
    for X in (one_point_curve(2), one_point_curve(3), EllipticCurve(2, RANK3_CURVE)):
        P = pipe(X)
        ys = X.closed_points_of_degree(1)
        for e in (1, 2):
            for x in X.closed_points_of_degree(e)[:2]:
                for n in (2, 3):
                    for gap in (e + 1, e + 2):
                        E = CoherentSheaf([IndecompSheaf(1, k * gap, ys[k % len(ys)], 1) for k in range(n)])
                        got = {t.target: t.multiplicity for t in P.neighborhood(E, x, 1)}
                        qx = X.q ** e
                        assert got == decomposable_closed_form(X, E, x)
                        assert sorted(got.values()) == [qx ** k for k in range(n)]
                        checked += 1
    record(5, True, "%d bundles, multiplicities q_x^(k-1)" % checked)


# 6
def test_criterion_6_symfunc():
    t = vpow(2)
    one = R.const(1)
    checks = [
        ({(2, 1): 1}, {(1, 1, 1): t ** 3 - one, (2, 1): t, (3,): one}),
        ({(1, 1): 1}, {(1, 1): t + one, (2,): one}),
        ({(1, 1, 1): 1}, {(1, 1, 1): t ** 3 + 2 * t ** 2 + 2 * t + one, (2, 1): t + 2 * one, (3,): one}),
    ]
    ok = all(SymFunc("power", p).to("hall-littlewood").coeffs == want for p, want in checks)
    ok &= mult_torsion_same_point((1,), (1,)) == {(1, 1): vpow(-2) + one, (2,): one}
    record(6, ok, "p1p2, p1^2, p1^3 in P basis and K_y K_y")
    assert ok


# 7
def _group_orders(X):
    return [(n, X.N(n)) for n in (1, 2, 3) if X.N(n) <= 30]


def test_criterion_7_properties():
    notes = []
    # Fourier roundtrip on every degree <= 3, on unit vectors
    for X in (one_point_curve(2), EllipticCurve(2, RANK3_CURVE)):
        T = CharTable(X)
        for d in (1, 2, 3):
            for cp in T.points_dividing(d):
                back = T.to_point_basis(d, T.to_char_basis(d, {cp: 1}))
                assert {k: v.to_rational() for k, v in back.items()} == {cp: 1}
    notes.append("fourier ok")
    # normal ordering under 100 seeded subdivision orders
    X = one_point_curve(2)
    word = ((1, 2), (0, 1), (1, -1), (0, 2), (1, 0))
    ref = Tower(1, X.symbolic_N).normal_order_word(word)
    assert all(is_normal(w) for w in ref)
    for seed in range(100):
        assert Tower(1, X.symbolic_N, seed=seed).normal_order_word(word) == ref
    notes.append("100 seeds identical")
    # class conservation and polygon containment on pipeline runs
    X = EllipticCurve(2, RANK3_CURVE)
    P = pipe(X)
    edges = 0
    for x in X.closed_points_of_degree(1):
        G = P.full_graph(x, 1, 2, -1, 1)
        for e in G.edges:
            assert e.target.cls == (2, e.source.degree - x.degree)
            assert polygon_contains(e.source, x.degree, 1, path_of(e.target))
            edges += 1
    notes.append("%d edges conserve class and sit in the polygon" % edges)
    # exhaustive group law and orthogonality for groups of order <= 30
    groups = 0
    for coeffs in [(0, 0, 1, 1, 1), RANK3_CURVE, (0, 0, 1, 1, 0), (1, 0, 0, 0, 1), (1, 0, 1, 0, 1)]:
        X = EllipticCurve(2, coeffs)
        T = CharTable(X)
        for n, N in _group_orders(X):
            pts = X.enumerate_points(n)
            for a, b, c in itertools.product(pts, repeat=3):
                assert X.group_add(X.group_add(a, b), c) == X.group_add(a, X.group_add(b, c))
            for a, b in itertools.product(pts, repeat=2):
                assert X.group_add(a, b) == X.group_add(b, a)
            chars = T.characters(n)
            for a, b in itertools.product(chars, repeat=2):
                acc = CycloScalar.scalar(0, T.M)
                for p in pts:
                    acc = acc + T.char_value(a, p) * T.char_value(T.conjugate(b), p)
                assert acc == CycloScalar.scalar(N if a == b else 0, T.M)
            groups += 1
    notes.append("%d groups exhaustive" % groups)
    record(7, True, "; ".join(notes))


# 8
def test_criterion_8_integrality():
    for k, fn in ((1, test_criterion_1_rank2_graph), (3, test_criterion_3_rank3_constants)):
        if k not in RUNS:
            try:
                fn()
            except AssertionError:
                pass
    total = bad = 0
    for P in RUNS[1] + RUNS[3]:
        c, b = _integral(P)
        total += c
        bad += b
    ok = record(8, bad == 0 and total > 0, "%d coefficients from the criterion 1 and 3 runs, %d bad" % (total, bad))
    assert ok


def report_lines():
    out = []
    for k in range(1, 9):
        if k in RESULTS:
            ok, detail = RESULTS[k]
            out.append("criterion %d: %s  %s" % (k, "PASS" if ok else "FAIL", detail))
        else:
            out.append("criterion %d: FAIL  (did not complete)" % k)
    return out


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                k = int(name.split("_")[2])
                RESULTS.setdefault(k, (False, "assertion failed"))
    print("\n".join(report_lines()))
    sys.exit(0 if all(RESULTS.get(k, (False,))[0] for k in range(1, 9)) else 1)
