import pytest
from hypothesis import given, settings, strategies as st

from artifact.curve import EllipticCurve
from artifact.heckegraph import (HeckePipeline, SumRuleViolation, decomposable_closed_form,
                                 gaussian_binomial, rank2_closed_form, rank3_closed_form,
                                 stable_closed_form, twist_by_point, verify_sum_rule)
from artifact.sheaves import (CoherentSheaf, IndecompSheaf, bundles_in_window, path_of,
                              polygon_contains, sheaf)


def line(curve, d, pt=None):
    return IndecompSheaf(1, d, pt or curve.base_closed_point, 1)


def test_gaussian_binomial():
    assert gaussian_binomial(2, 1, 2) == 3
    assert gaussian_binomial(3, 1, 2) == 7
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(3, 4, 2) == 0


def test_count_matches_fourier(X2, E5pts, pipeline):
    for curve in (X2, E5pts):
        P = pipeline(curve)
        x1 = curve.closed_points_of_degree(1)[0]
        for E in bundles_in_window(curve, 2, -1, 1)[:12]:
            assert P.product_vec(x1, 1, E, "count") == P.product_vec(x1, 1, E, "fourier")
    x2 = X2.closed_points_of_degree(2)[0]
    E = sheaf(line(X2, 0), line(X2, 3))
    P = pipeline(X2)
    assert P.product_vec(x2, 1, E, "count") == P.product_vec(x2, 1, E, "fourier")


@pytest.mark.parametrize("name", ["X2", "X3", "E3pts"])
def test_sum_rules_rank2(name, request, pipeline):
    curve = request.getfixturevalue(name)
    P = pipeline(curve)
    for x in curve.closed_points_of_degree(1) + curve.closed_points_of_degree(2)[:1]:
        for E in bundles_in_window(curve, 2, -1, 1):
            edges = P.neighborhood(E, x, 1)
            assert sum(e.multiplicity for e in edges) == (curve.q ** x.degree) + 1


def test_sum_rule_violation_reported(X2):
    with pytest.raises(SumRuleViolation):
        verify_sum_rule([], X2.base_closed_point, 1, 2, 2)


def test_l_plus_l(X2, pipeline):
    # L + L at x = x0 has q + 1 lines to pick, all giving L(-x) + L
    L = line(X2, 0)
    edges = pipeline(X2).neighborhood(sheaf(L, L), X2.base_closed_point, 1)
    assert [(e.target, e.multiplicity) for e in edges] == [(sheaf(line(X2, -1), L), 3)]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_r_equals_n_is_twist(X2, E3pts, pipeline, n):
    for curve in (X2, E3pts):
        x = curve.closed_points_of_degree(1)[-1]
        E = CoherentSheaf([line(curve, k) for k in range(n)])
        (edge,) = pipeline(curve).neighborhood(E, x, n)
        assert edge.multiplicity == 1
        F = edge.target
        assert F.cls == (n, E.degree - n)
        # the incoming side sees the same edge
        assert pipeline(curve).incoming(F, x, n) == {E: 1}
        assert twist_by_point(curve, F, x, 1) == E


def test_rank3_constants(E3pts, pipeline):
    P = pipeline(E3pts)
    ones = E3pts.closed_points_of_degree(1)
    seen = set()
    for x in ones:
        for xp in ones:
            E = sheaf(IndecompSheaf(3, 2, xp, 1))
            got = P.incoming(E, x, 1)
            assert got == rank3_closed_form(E3pts, x, xp, 2)
            seen.update(got.values())
    assert seen == {7, 4, 3, 2, 1}


def test_stable(E5pts, pipeline):
    P = pipeline(E5pts)
    x = E5pts.closed_points_of_degree(1)[1]
    for n in (2, 3):
        for y in E5pts.closed_points_of_degree(n):
            E = sheaf(IndecompSheaf(n, n, y, 1))
            assert P.incoming(E, x, 1) == stable_closed_form(E5pts, E, x)


def test_decomposable(X2, pipeline):
    x = X2.closed_points_of_degree(2)[1]
    E = sheaf(line(X2, 0), line(X2, 3), line(X2, 6))
    got = {e.target: e.multiplicity for e in pipeline(X2).neighborhood(E, x, 1)}
    assert got == decomposable_closed_form(X2, E, x)
    assert sorted(got.values()) == [1, 4, 16]


def test_rank2_closed_form_x2(X2, pipeline):
    P = pipeline(X2)
    for E in bundles_in_window(X2, 2, -2, 2):
        got = {e.target: e.multiplicity for e in P.neighborhood(E, X2.base_closed_point, 1)}
        assert got == rank2_closed_form(X2, E)


def test_empty_window(X2, pipeline):
    G = pipeline(X2).full_graph(X2.base_closed_point, 1, 2, 1, 0)
    assert G.vertices == [] and G.edges == []


def test_polygon_on_every_edge(E3pts, pipeline):
    P = pipeline(E3pts)
    for x in E3pts.closed_points_of_degree(1):
        G = P.full_graph(x, 1, 2, -1, 1)
        assert G.edges
        for e in G.edges:
            assert polygon_contains(e.source, x.degree, 1, path_of(e.target))


@settings(max_examples=8, deadline=None)
@given(st.integers(-2, 2), st.integers(0, 2))
def test_twist_equivariance(k, xi):
    # twisting by a line bundle of degree k shifts the whole neighbourhood
    curve = EllipticCurve(2, (0, 0, 1, 0, 0))
    P = HeckePipeline(curve)
    x = curve.closed_points_of_degree(1)[xi]
    x0 = curve.base_closed_point
    E = sheaf(line(curve, 0), IndecompSheaf(1, 1, curve.closed_points_of_degree(1)[1], 1))

    def tw(F):
        out = F
        for _ in range(abs(k)):
            out = twist_by_point(curve, out, x0, 1 if k > 0 else -1)
        return out

    a = {tw(e.target): e.multiplicity for e in P.neighborhood(E, x, 1)}
    b = {e.target: e.multiplicity for e in P.neighborhood(tw(E), x, 1)}
    assert a == b


def test_rejects_bad_r(X2, pipeline):
    with pytest.raises(ValueError):
        pipeline(X2).neighborhood(sheaf(line(X2, 0)), X2.base_closed_point, 2)
