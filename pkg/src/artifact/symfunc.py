"""Symmetric functions over Q(v): monomial, elementary, power-sum and
Hall-Littlewood bases, with t specialised to a power of v.

Partitions are plain descending tuples.  Transition matrices are built per
(weight, t-exponent) and cached.
"""

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .scalars import ONE, ZERO, RationalFunctionV, as_scalar, vpow

WEIGHT_BOUND = 8


class WeightBoundExceeded(ValueError):
    pass


def _check(n):
    if n > WEIGHT_BOUND:
        raise WeightBoundExceeded("weight %d exceeds bound %d" % (n, WEIGHT_BOUND))


# -- partitions
def partition(parts):
    p = tuple(sorted((int(a) for a in parts if a), reverse=True))
    if any(a < 0 for a in p):
        raise ValueError("negative part in %r" % (parts,))
    return p


@lru_cache(maxsize=None)
def partitions(n, maxpart=None):
    """Partitions of n in reverse lexicographic order ((n) first)."""
    if maxpart is None:
        maxpart = n
    if n == 0:
        return ((),)
    out = []
    for k in range(min(n, maxpart), 0, -1):
        for rest in partitions(n - k, k):
            out.append((k,) + rest)
    return tuple(out)


def n_of(lam):
    return sum(i * a for i, a in enumerate(lam))


def z_of(lam):
    z = 1
    for part, mult in Counter(lam).items():
        z *= part ** mult * factorial(mult)
    return z


def dominates(lam, mu):
    """lam >= mu in dominance order (same weight)."""
    s1 = s2 = 0
    for i in range(max(len(lam), len(mu))):
        s1 += lam[i] if i < len(lam) else 0
        s2 += mu[i] if i < len(mu) else 0
        if s1 < s2:
            return False
    return True


def _order(n):
    # increasing order: a linear extension of dominance (reverse lex reversed)
    return list(reversed(partitions(n)))


# -- power sums in the monomial basis (integer matrix)
@lru_cache(maxsize=None)
def _p_in_m(lam):
    """p_lam = sum_mu L[mu] m_mu."""
    n = sum(lam)
    out = {}
    for mu in partitions(n):
        c = _count_fill(lam, mu)
        if c:
            out[mu] = c
    return out


@lru_cache(maxsize=None)
def _count_fill(parts, bins):
    """Ways to assign each of parts (in order) to a bin so bin sums equal bins."""
    if not parts:
        return 1 if not any(bins) else 0
    a, rest = parts[0], parts[1:]
    total = 0
    for i, b in enumerate(bins):
        if b >= a:
            nb = bins[:i] + (b - a,) + bins[i + 1:]
            total += _count_fill(rest, nb)
    return total


@lru_cache(maxsize=None)
def _m_in_p(n):
    """m_mu = sum_lam Linv[mu][lam] p_lam, Fraction coefficients."""
    order = _order(n)  # p_lam involves m_mu with mu >= lam
    rows = {}
    # p_lam = L[lam][lam] m_lam + sum_{mu > lam} L[lam][mu] m_mu ; solve from the top
    for lam in reversed(order):
        pl = _p_in_m(lam)
        diag = Fraction(pl[lam])
        acc = {lam: Fraction(1)}
        for mu, c in pl.items():
            if mu != lam:
                for nu, d in rows[mu].items():
                    acc[nu] = acc.get(nu, 0) - c * d
        rows[lam] = {k: a / diag for k, a in acc.items() if a}
    return rows


# -- elementary functions
@lru_cache(maxsize=None)
def newton_e_to_p(m):
    """e_m in power sums via m e_m = sum_i (-1)^(i-1) p_i e_(m-i)."""
    if m == 0:
        return {(): Fraction(1)}
    out = {}
    for i in range(1, m + 1):
        sign = 1 if i % 2 else -1
        for lam, c in newton_e_to_p(m - i).items():
            key = partition(lam + (i,))
            out[key] = out.get(key, 0) + Fraction(sign, m) * c
    return {k: a for k, a in out.items() if a}


def e_in_p_closed(m):
    return {lam: Fraction((-1) ** (m - len(lam)), z_of(lam)) for lam in partitions(m)}


# -- Hall-Littlewood
def _t(tpow):
    return vpow(tpow)


@lru_cache(maxsize=None)
def _hl_tables(n, tpow):
    """P_lam in the p-basis and in the m-basis, for t = v^tpow."""
    _check(n)
    t = _t(tpow)
    order = _order(n)
    minp = _m_in_p(n)
    zt = {}
    for lam in order:
        w = RationalFunctionV.const(z_of(lam))
        for a in lam:
            w = w / (ONE - t ** a)
        zt[lam] = w

    def ip(f, g):
        acc = ZERO
        for lam, a in f.items():
            b = g.get(lam)
            if b is not None:
                acc = acc + a * b * zt[lam]
        return acc

    P_p = {}
    P_m = {}
    norms = {}
    for lam in order:
        vec = {k: as_scalar(a) for k, a in minp[lam].items()}
        mvec = {lam: ONE}
        for mu in order:
            if mu == lam:
                break
            c = ip(vec, P_p[mu])
            if c:
                c = c / norms[mu]
                for k, a in P_p[mu].items():
                    vec[k] = vec.get(k, ZERO) - c * a
                for k, a in P_m[mu].items():
                    mvec[k] = mvec.get(k, ZERO) - c * a
        P_p[lam] = {k: a for k, a in vec.items() if a}
        P_m[lam] = {k: a for k, a in mvec.items() if a}
        norms[lam] = ip(P_p[lam], P_p[lam])
    return P_p, P_m, norms


def hl_expand(lam, tpow=2):
    """P_lam in the monomial basis."""
    lam = partition(lam)
    return dict(_hl_tables(sum(lam), tpow)[1][lam])


def hl_in_p(lam, tpow=2):
    lam = partition(lam)
    return dict(_hl_tables(sum(lam), tpow)[0][lam])


def hl_inner(f, g, tpow=2):
    """Hall-Littlewood pairing of two p-basis dicts."""
    t = _t(tpow)
    acc = ZERO
    for lam, a in f.items():
        if lam in g:
            w = RationalFunctionV.const(z_of(lam))
            for part in lam:
                w = w / (ONE - t ** part)
            acc = acc + as_scalar(a) * as_scalar(g[lam]) * w
    return acc


@lru_cache(maxsize=None)
def _m_to_P(n, tpow):
    """m_mu = sum_lam R[mu][lam] P_lam (unitriangular inverse of P in m)."""
    P_m = _hl_tables(n, tpow)[1]
    rows = {}
    for lam in _order(n):
        # P_lam = m_lam + sum_{mu < lam} K m_mu  =>  m_lam = P_lam - sum K m_mu
        acc = {lam: ONE}
        for mu, c in P_m[lam].items():
            if mu != lam:
                for nu, d in rows[mu].items():
                    acc[nu] = acc.get(nu, ZERO) - c * d
        rows[lam] = {k: a for k, a in acc.items() if a}
    return rows


def m_to_hl(mdict, tpow=2):
    out = {}
    for mu, c in mdict.items():
        if not c:
            continue
        for lam, d in _m_to_P(sum(mu), tpow)[mu].items():
            out[lam] = out.get(lam, ZERO) + as_scalar(c) * d
    return {k: a for k, a in out.items() if a}


def p_to_hl(lam, tpow=2):
    """The product p_lam expanded in Hall-Littlewood P functions."""
    lam = partition(lam)
    _check(sum(lam))
    return m_to_hl(_p_in_m(lam), tpow)


def pdict_to_hl(pdict, tpow=2):
    out = {}
    for lam, c in pdict.items():
        for mu, d in p_to_hl(lam, tpow).items():
            out[mu] = out.get(mu, ZERO) + as_scalar(c) * d
    return {k: a for k, a in out.items() if a}


def p_mul(f, g):
    out = {}
    for a, x in f.items():
        for b, y in g.items():
            k = partition(a + b)
            out[k] = out.get(k, ZERO) + as_scalar(x) * as_scalar(y)
    return {k: c for k, c in out.items() if c}


# -- the bridge with torsion sheaves at a point of degree d (u = v^d, t = u^2)
def n_u(l, upow):
    acc = ONE
    for i in range(1, l + 1):
        acc = acc * (ONE - vpow(-2 * i * upow))
    return acc


def psi_inverse_p(m, upow=1):
    """Psi^-1(p_m) = sum_{|lam| = m} n_u(l(lam) - 1) I_lam."""
    return {lam: n_u(len(lam) - 1, upow) for lam in partitions(m)}


def torsion_from_hl(hdict, upow=1):
    """sum c_lam P_lam  ->  sum c_lam u^(-2 n(lam)) I_lam."""
    return {lam: c * vpow(-2 * upow * n_of(lam)) for lam, c in hdict.items() if c}


def mult_torsion_same_point(lam, mu, pointdeg=1):
    """K^(lam) K^(mu) at one point, as a dict over partitions of I_nu."""
    lam, mu = partition(lam), partition(mu)
    _check(sum(lam) + sum(mu))
    tp = 2 * pointdeg
    if not lam:
        return {mu: ONE}
    if not mu:
        return {lam: ONE}
    prod = p_mul(hl_in_p(lam, tp), hl_in_p(mu, tp))
    pre = vpow(2 * pointdeg * (n_of(lam) + n_of(mu)))
    hl = pdict_to_hl(prod, tp)
    return {nu: c * pre for nu, c in torsion_from_hl(hl, pointdeg).items()}


class SymFunc:
    """A homogeneous symmetric function stored in one basis."""

    BASES = ("monomial", "elementary", "power", "hall-littlewood")

    def __init__(self, basis, coeffs, tpow=2):
        if basis not in self.BASES:
            raise ValueError("unknown basis %r" % basis)
        self.basis = basis
        self.tpow = tpow
        self.coeffs = {partition(k): as_scalar(v) for k, v in coeffs.items() if v}

    def to_power(self):
        out = {}
        for lam, c in self.coeffs.items():
            if self.basis == "power":
                piece = {lam: ONE}
            elif self.basis == "monomial":
                piece = _m_in_p(sum(lam))[lam]
            elif self.basis == "elementary":
                piece = {(): Fraction(1)}
                for part in lam:
                    piece = p_mul(piece, newton_e_to_p(part))
            else:
                piece = hl_in_p(lam, self.tpow)
            for k, a in piece.items():
                out[k] = out.get(k, ZERO) + c * as_scalar(a)
        return SymFunc("power", out, self.tpow)

    def to(self, basis):
        p = self.to_power()
        if basis == "power":
            return p
        if basis == "monomial":
            out = {}
            for lam, c in p.coeffs.items():
                for mu, a in _p_in_m(lam).items():
                    out[mu] = out.get(mu, ZERO) + c * a
            return SymFunc("monomial", out, self.tpow)
        if basis == "hall-littlewood":
            return SymFunc(basis, pdict_to_hl(p.coeffs, self.tpow), self.tpow)
        if basis == "elementary":
            # triangular solve: e_lam' has leading monomial m_lam (lam' = conjugate)
            m = p.to("monomial").coeffs
            out = {}
            m = dict(m)
            while m:
                lam = max(m, key=lambda k: _order(sum(k)).index(k))
                c = m.pop(lam)
                conj = conjugate(lam)
                out[conj] = c
                for mu, a in SymFunc("elementary", {conj: 1}).to("monomial").coeffs.items():
                    if mu != lam:
                        m[mu] = m.get(mu, ZERO) - c * a
                        if not m[mu]:
                            del m[mu]
            return SymFunc("elementary", out, self.tpow)
        raise ValueError(basis)

    def __eq__(self, other):
        return isinstance(other, SymFunc) and self.to_power().coeffs == other.to_power().coeffs

    def __repr__(self):
        terms = ["(%s)*%s%s" % (c, self.basis[0], list(k)) for k, c in sorted(self.coeffs.items())]
        return " + ".join(terms) or "0"


def conjugate(lam):
    if not lam:
        return ()
    return tuple(sum(1 for a in lam if a > i) for i in range(lam[0]))
