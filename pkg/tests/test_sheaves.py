from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from artifact.sheaves import (CollinearInput, ConeViolation, IndecompSheaf, LabelError, apply,
                              bundles_in_window, classify_rank2, display_name, enumerate_bundles,
                              euler_form, gamma, hn_decompose, inverse, kvector, labels_for_class,
                              matmul, path_of, pick_interior_bruteforce, pick_interior_count,
                              polygon_contains, sheaf, sl2_to_vertical, slope)

vec = st.tuples(st.integers(-6, 6), st.integers(-6, 6))
cone = vec.filter(lambda v: v[0] > 0 or (v[0] == 0 and v[1] > 0))


def test_cone():
    assert kvector(0, 1) == (0, 1)
    for bad in [(0, 0), (0, -1), (-1, 3)]:
        with pytest.raises(ConeViolation):
            kvector(*bad)


def test_euler_form():
    assert euler_form((1, 0), (0, 1)) == 1
    assert euler_form((2, 3), (1, 1)) == -1


@given(vec, vec)
def test_euler_skew(a, b):
    assert euler_form(a, b) == -euler_form(b, a)


@pytest.mark.parametrize("v,g", [((1, 0), 1), ((2, 4), 2), ((3, 5), 1), ((0, 3), 3), ((4, -6), 2)])
def test_sl2_examples(v, g):
    f = sl2_to_vertical(*v)
    assert apply(f, v) == (0, g)
    assert matmul(f, inverse(f)) == ((1, 0), (0, 1))


@given(cone)
def test_sl2_property(v):
    f = sl2_to_vertical(*v)
    assert apply(f, v) == (0, gamma(v))
    assert apply(inverse(f), (0, gamma(v))) == v


@settings(max_examples=200)
@given(vec, vec)
def test_pick_matches_bruteforce(a, b):
    D = a[0] * b[1] - a[1] * b[0]
    assume(D != 0 and abs(D) <= 12)
    assert pick_interior_count(a, b) == pick_interior_bruteforce(a, b)


def test_pick_collinear():
    with pytest.raises(CollinearInput):
        pick_interior_count((1, 2), (2, 4))


def test_label_error(X2):
    p2 = X2.closed_points_of_degree(2)[0]
    with pytest.raises(LabelError):
        IndecompSheaf(2, 3, p2, 1)
    with pytest.raises(LabelError):
        IndecompSheaf(2, 4, X2.base_closed_point, 1)
    IndecompSheaf(2, 4, p2, 1)


def test_relabel_roundtrip(X2):
    x0 = X2.base_closed_point
    p2 = X2.closed_points_of_degree(2)[0]
    for E in [sheaf(IndecompSheaf(2, 4, p2, 1)), sheaf(IndecompSheaf(3, 3, x0, 3)),
              sheaf(IndecompSheaf(1, 0, x0, 1), IndecompSheaf(1, 2, x0, 1))]:
        for p in E.parts:
            f = sl2_to_vertical(p.n, p.d)
            image = p.relabel(f)
            assert image.cls == (0, gamma(p.cls))
            assert image.point == p.point and image.weight == p.weight
            assert image.relabel(inverse(f)) == p


def test_hn(X2):
    x0 = X2.base_closed_point
    E = sheaf(IndecompSheaf(1, 2, x0, 1), IndecompSheaf(1, 0, x0, 1), IndecompSheaf(0, 1, x0, 1))
    hn = hn_decompose(E)
    assert [s for s, _ in hn] == [0, 2, slope((0, 1))]
    assert path_of(E) == [(1, 0), (1, 2), (0, 1)]
    assert E.cls == (2, 3) and not E.is_vector_bundle()


def test_polygon(X2):
    x0 = X2.base_closed_point
    L = lambda d: IndecompSheaf(1, d, x0, 1)
    E = sheaf(L(0), L(0))
    assert polygon_contains(E, 1, 1, [(1, -1), (1, 0)])
    assert polygon_contains(E, 1, 1, [(2, -1)])
    assert not polygon_contains(E, 1, 1, [(1, -2), (1, 1)])
    assert not polygon_contains(E, 1, 1, [(2, 0)])


def test_labels(X2):
    labs = labels_for_class(X2, 2, 4)
    assert sorted((cp.degree, w) for cp, w in labs) == [(1, 2), (2, 1), (2, 1)]


def test_bun2_counts_x2(X2):
    for d in range(-3, 4):
        bs = enumerate_bundles(X2, 2, d, Fraction(d, 2), Fraction(d, 2))
        kinds = sorted(classify_rank2(E) for E in bs)
        if d % 2:
            assert kinds == ["gi"]
        else:
            # L+L, E(L), two trace bundles
            assert kinds == ["dec", "gi", "tr", "tr"]


def test_window(X2):
    bs = bundles_in_window(X2, 2, -1, 1)
    for E in bs:
        assert all(-1 <= p.slope <= 1 for p in E.parts)
    names = [display_name(E) for E in bs]
    assert len(set(names)) == len(names)
    assert "L(-1,x0)+L(1,x0)" in names
