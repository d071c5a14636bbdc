import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from artifact.scalars import ONE, vpow
from artifact.symfunc import (SymFunc, WeightBoundExceeded, conjugate, dominates, e_in_p_closed,
                              hl_expand, hl_in_p, hl_inner, mult_torsion_same_point, n_of,
                              newton_e_to_p, partitions, psi_inverse_p, z_of)

t = vpow(2)
v = vpow(1)


def test_partitions_and_stats():
    assert len(partitions(6)) == 11
    assert n_of((2, 1)) == 1 and n_of((1, 1, 1)) == 3
    assert z_of((1, 1, 1)) == 6 and z_of((2, 1)) == 2 and z_of((3,)) == 3
    assert conjugate((3, 1)) == (2, 1, 1)
    assert dominates((3,), (2, 1)) and not dominates((1, 1, 1), (2, 1))


@pytest.mark.parametrize("m", range(1, 7))
def test_newton_matches_closed(m):
    assert newton_e_to_p(m) == e_in_p_closed(m)


def test_newton_small():
    assert newton_e_to_p(2) == {(1, 1): Fraction(1, 2), (2,): Fraction(-1, 2)}


def test_hl_two():
    assert hl_expand((2,)) == {(2,): ONE, (1, 1): ONE - t}
    assert hl_expand((1, 1)) == {(1, 1): ONE}


def _brute_hl(lam, tval):
    """P_lam in |lam| variables by symmetrising over S_n."""
    n = sum(lam)
    xs = sympy.symbols("x0:%d" % n)
    lam = list(lam) + [0] * (n - len(lam))
    base = sympy.Integer(1)
    for i, a in enumerate(lam):
        base *= xs[i] ** a
    for i in range(n):
        for j in range(i + 1, n):
            base *= (xs[i] - tval * xs[j]) / (xs[i] - xs[j])
    total = 0
    for perm in itertools.permutations(range(n)):
        total += base.subs({xs[i]: xs[perm[i]] for i in range(n)}, simultaneous=True)
    vl = sympy.Integer(1)
    for k in set(lam):
        mult = lam.count(k)
        for j in range(1, mult + 1):
            vl *= sympy.Rational(1 - tval ** j, 1 - tval)
    poly = sympy.Poly(sympy.cancel(total / vl), *xs)
    out = {}
    for mono, c in poly.terms():
        key = tuple(sorted((e for e in mono if e), reverse=True))
        out[key] = c
    return out


@pytest.mark.parametrize("lam", [(2,), (1, 1), (3,), (2, 1), (1, 1, 1), (3, 1), (2, 2), (2, 1, 1)])
def test_hl_against_symmetrisation(lam):
    # v = 2, so t = 4
    want = _brute_hl(lam, 4)
    got = hl_expand(lam)
    assert set(got) == set(want)
    for mu, c in got.items():
        assert c.evaluate(2) == Fraction(int(want[mu].p), int(want[mu].q))


def test_power_products_in_hl():
    p11 = SymFunc("power", {(1, 1): 1}).to("hall-littlewood").coeffs
    assert p11 == {(1, 1): t + ONE, (2,): ONE}
    p21 = SymFunc("power", {(2, 1): 1}).to("hall-littlewood").coeffs
    assert p21 == {(1, 1, 1): t ** 3 - ONE, (2, 1): t, (3,): ONE}
    p111 = SymFunc("power", {(1, 1, 1): 1}).to("hall-littlewood").coeffs
    assert p111 == {(1, 1, 1): t ** 3 + 2 * t ** 2 + 2 * t + ONE, (2, 1): t + 2 * ONE, (3,): ONE}


def test_psi_inverse():
    assert psi_inverse_p(1) == {(1,): ONE}
    assert psi_inverse_p(2) == {(2,): ONE, (1, 1): ONE - v ** -2}


def test_torsion_product_at_one_point():
    assert mult_torsion_same_point((1,), (1,)) == {(1, 1): v ** -2 + ONE, (2,): ONE}
    assert mult_torsion_same_point((), (2,)) == {(2,): ONE}


@pytest.mark.parametrize("n", range(1, 6))
def test_unitriangular(n):
    for lam in partitions(n):
        P = hl_expand(lam)
        assert P[lam] == ONE
        assert all(dominates(lam, mu) for mu in P)


@pytest.mark.parametrize("n", range(1, 5))
def test_hl_orthogonal(n):
    ps = partitions(n)
    for a in ps:
        for b in ps:
            ip = hl_inner(hl_in_p(a), hl_in_p(b))
            assert bool(ip) == (a == b)


basis = st.sampled_from(SymFunc.BASES)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.data(), basis, basis)
def test_roundtrips(n, data, b1, b2):
    ps = partitions(n)
    coeffs = {lam: data.draw(st.integers(-3, 3)) for lam in data.draw(st.lists(st.sampled_from(ps), max_size=3))}
    f = SymFunc(b1, coeffs)
    g = f.to(b2).to(b1)
    assert g == f
    assert g.coeffs == f.coeffs


def test_weight_bound():
    with pytest.raises(WeightBoundExceeded):
        hl_expand((9,))
