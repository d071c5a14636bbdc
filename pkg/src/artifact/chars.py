"""Characters of Pic^0(X_n) = X(F_{q^n}), Frobenius orbits, norms, Fourier maps.

Character values are roots of unity zeta_M^k with one global conductor M
per table (lcm of the group exponents of all degrees up to the curve's
max_degree), so values from different degrees can be multiplied freely.
"""

from fractions import Fraction
from functools import reduce
from math import gcd

from .curve import NonDividingDegree
from .scalars import CycloScalar, GroupRingQ, as_scalar


def _lcm(a, b):
    return a * b // gcd(a, b)


class AbelianStructure:
    """X(F_{q^n}) as Z/d1 x Z/d2 (d1 | d2), generators h1, h2, full dlog table."""

    def __init__(self, curve, n):
        self.curve = curve
        self.n = n
        pts = curve.enumerate_points(n)
        self.points = pts
        N = len(pts)
        add = curve.group_add
        x0 = curve.x0
        order = {}
        for p in pts:
            k, cur = 1, p
            while cur != x0:
                cur = add(cur, p)
                k += 1
            order[p] = k
        g = max(pts, key=lambda p: (order[p], -pts.index(p)))
        d2 = order[g]
        d1 = N // d2
        cyc = self._span(g, d2)
        h1 = x0
        if d1 > 1:
            for p in pts:
                if order[p] == d1 and not (set(self._span(p, d1)) - {x0}) & set(cyc):
                    h1 = p
                    break
            else:
                raise AssertionError("no complement found")
        self.orders = (d1, d2)
        self.gens = (h1, g)
        self.exponent = d2
        self.dlog_table = {}
        a = x0
        for c1 in range(d1):
            b = a
            for c2 in range(d2):
                self.dlog_table[b] = (c1, c2)
                b = add(b, g)
            a = add(a, h1)
        assert len(self.dlog_table) == N, "generators do not span the group"

    def _span(self, p, k):
        out, cur = [], self.curve.x0
        for _ in range(k):
            out.append(cur)
            cur = self.curve.group_add(cur, p)
        return out

    @property
    def order(self):
        return len(self.points)

    def dlog(self, pt):
        return self.dlog_table[pt]

    def element(self, c1, c2):
        c = self.curve
        return c.group_add(c.group_mul(c1, self.gens[0]), c.group_mul(c2, self.gens[1]))

    def invariants(self):
        return tuple(d for d in self.orders if d > 1)

    def __repr__(self):
        inv = self.invariants()
        return "Z/" + " x Z/".join(map(str, inv)) if inv else "trivial"


class Character:
    __slots__ = ("n", "exps")

    def __init__(self, n, exps):
        self.n = n
        self.exps = tuple(exps)

    def __eq__(self, other):
        return isinstance(other, Character) and (self.n, self.exps) == (other.n, other.exps)

    def __hash__(self):
        return hash((self.n, self.exps))

    def __lt__(self, other):
        return (self.n, self.exps) < (other.n, other.exps)

    def __repr__(self):
        return "chi%d%s" % (self.n, list(self.exps))


class CharOrbit:
    __slots__ = ("n", "chars", "rep")

    def __init__(self, n, chars):
        self.n = n
        self.chars = tuple(sorted(set(chars)))
        self.rep = self.chars[0]

    @property
    def size(self):
        return len(self.chars)

    def is_trivial(self):
        return not any(self.rep.exps)

    def __eq__(self, other):
        return isinstance(other, CharOrbit) and self.n == other.n and self.rep == other.rep

    def __hash__(self):
        return hash((self.n, self.rep))

    def __lt__(self, other):
        return (self.n, self.rep.exps) < (other.n, other.rep.exps)

    def __repr__(self):
        return "orbit%d%s" % (self.n, list(self.rep.exps))


class CharTable:
    """All character data of one curve, built lazily per degree."""

    def __init__(self, curve):
        self.curve = curve
        self._struct = {}
        self._frob = {}
        self._orbits = {}
        self._orbit_of = {}
        self._norm = {}
        self._values = {}
        degs = [n for n in range(1, curve.max_degree + 1) if curve.L % n == 0]
        self.M = reduce(_lcm, (self.structure(n).exponent for n in degs), 1)

    def structure(self, n):
        if n not in self._struct:
            self._struct[n] = AbelianStructure(self.curve, n)
        return self._struct[n]

    def decompose(self, n):
        return self.structure(n)

    # -- characters as exponent maps
    def characters(self, n):
        d1, d2 = self.structure(n).orders
        return [Character(n, (a, b)) for a in range(d1) for b in range(d2)]

    def exponent(self, chi, pt):
        """k with chi(pt) = zeta_M^k."""
        S = self.structure(chi.n)
        e1, e2 = S.dlog(pt)
        d1, d2 = S.orders
        M = self.M
        return (chi.exps[0] * e1 * (M // d1) + chi.exps[1] * e2 * (M // d2)) % M

    def char_value(self, chi, pt):
        return CycloScalar.root(self.M, self.exponent(chi, pt))

    def _from_values(self, n, fn):
        """Character of degree n whose value at each generator is zeta_M^fn(gen)."""
        S = self.structure(n)
        d1, d2 = S.orders
        M = self.M
        exps = []
        for d, h in zip((d1, d2), S.gens):
            k = fn(h) % M
            assert k % (M // d) == 0
            exps.append((k // (M // d)) % d)
        return Character(n, exps)

    def frobenius(self, chi):
        """chi o Fr."""
        key = chi
        if key not in self._frob:
            self._frob[key] = self._from_values(chi.n, lambda h: self.exponent(chi, self.curve.frobenius(h)))
        return self._frob[key]

    def conjugate(self, chi):
        d1, d2 = self.structure(chi.n).orders
        return Character(chi.n, ((-chi.exps[0]) % d1, (-chi.exps[1]) % d2))

    def norm_char(self, chi, n):
        """chi o Norm_m^n as a character of degree n."""
        m = chi.n
        if n % m:
            raise NonDividingDegree("%d does not divide %d" % (m, n))
        key = (chi, n)
        if key not in self._norm:
            c = self.curve
            self._norm[key] = self._from_values(n, lambda h: self.exponent(chi, c.point_norm(h, n, m)))
        return self._norm[key]

    def orbits(self, n):
        if n not in self._orbits:
            seen = set()
            out = []
            for chi in self.characters(n):
                if chi in seen:
                    continue
                orb = [chi]
                nxt = self.frobenius(chi)
                while nxt != chi:
                    orb.append(nxt)
                    nxt = self.frobenius(nxt)
                seen.update(orb)
                o = CharOrbit(n, orb)
                assert n % o.size == 0
                out.append(o)
                for c in orb:
                    self._orbit_of[c] = o
            out.sort()
            self._orbits[n] = out
        return self._orbits[n]

    def orbit_of(self, chi):
        self.orbits(chi.n)
        return self._orbit_of[chi]

    def norm_orbit(self, orbit, n):
        return self.orbit_of(self.norm_char(orbit.rep, n))

    def primitive_orbits(self, n):
        return [o for o in self.orbits(n) if o.size == n]

    def is_norm_from_proper(self, orbit):
        n = orbit.n
        for m in range(1, n):
            if n % m == 0:
                for o in self.orbits(m):
                    if self.norm_orbit(o, n) == orbit:
                        return True
        return False

    def primitive_source(self, orbit):
        """(sigma, m): primitive orbit of degree m = orbit size with Norm(sigma) = orbit."""
        m = orbit.size
        for s in self.primitive_orbits(m):
            if self.norm_orbit(s, orbit.n) == orbit:
                return s, m
        raise AssertionError("orbit %r is not a norm of a primitive orbit" % (orbit,))

    # -- orbit averages
    def orbit_value_group(self, orbit, cp, negate=False):
        """rho~(x) (or rho~(-x)) as a GroupRingQ element; 0 if |x| does not divide n."""
        key = (orbit, cp, negate)
        if key not in self._values:
            n = orbit.n
            if n % cp.degree:
                self._values[key] = GroupRingQ(self.M, {})
            else:
                out = {}
                w = Fraction(1, cp.degree)
                for p in cp.points:
                    k = self.exponent(orbit.rep, p)
                    if negate:
                        k = -k % self.M
                    out[k] = out.get(k, 0) + w
                self._values[key] = GroupRingQ(self.M, {k: a for k, a in out.items() if a})
        return self._values[key]

    def orbit_value(self, orbit, cp, negate=False):
        return self.orbit_value_group(orbit, cp, negate).to_cyclo()

    def orbit_value_check(self, orbit, cp):
        """Average computed with every representative and every point above x."""
        vals = set()
        for chi in orbit.chars:
            for p in cp.points:
                acc = CycloScalar.scalar(0, self.M)
                n = orbit.n
                cur = p
                for _ in range(n):
                    acc = acc + CycloScalar.root(self.M, self.exponent(chi, cur))
                    cur = self.curve.frobenius(cur)
                vals.add(acc * Fraction(1, n))
        return len(vals) == 1 and vals.pop() == self.orbit_value(orbit, cp)

    # -- Fourier transforms between T_v^rho and T_{v,x}
    def points_dividing(self, d):
        out = []
        for e in range(1, d + 1):
            if d % e == 0:
                out.extend(self.curve.closed_points_of_degree(e))
        return out

    def to_point_basis(self, d, coeffs):
        """sum_rho a_rho T^rho  ->  sum_x b_x T_x  with b_x = sum_rho a_rho rho~(x)."""
        out = {}
        for cp in self.points_dividing(d):
            acc = CycloScalar.scalar(0, self.M)
            for orb, a in coeffs.items():
                acc = acc + self.orbit_value(orb, cp) * _cy(a, self.M)
            if acc != CycloScalar.scalar(0, self.M):
                out[cp] = acc
        return out

    def to_char_basis(self, d, coeffs):
        """sum_y b_y T_y -> sum_rho a_rho T^rho via
        T_y = |y| N_d^-1 sum_{characters rho} rho~(-y) T^rho."""
        N = self.structure(d).order
        out = {}
        for orb in self.orbits(d):
            acc = CycloScalar.scalar(0, self.M)
            for cp, b in coeffs.items():
                w = Fraction(cp.degree * orb.size, N)
                acc = acc + self.orbit_value(orb, cp, negate=True) * _cy(b, self.M) * w
            if acc != CycloScalar.scalar(0, self.M):
                out[orb] = acc
        return out


def _cy(a, M):
    if isinstance(a, CycloScalar):
        return a
    return CycloScalar.scalar(as_scalar(a), M)
