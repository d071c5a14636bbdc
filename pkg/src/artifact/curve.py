"""Elliptic curves over small finite fields.

All extension fields F_{q^n} used by a curve live inside one ambient field
F_{q^L}, L = lcm(1..max_degree); F_{q^n} is the fixed field of the n-th
power of Frobenius.  Field elements are plain ints (base-p digit vectors of
a polynomial modulo the ambient defining polynomial), multiplied through
log tables and added through Zech logarithms.

Points are (x, y) int pairs, or None for the point at infinity.  The group
law exposed as ``group_add`` is the chord-tangent law translated so that the
configured base point x0 is the neutral element.
"""

from functools import reduce
from math import gcd

from .scalars import ONE, RationalFunctionV, vpow


class DegreeBoundExceeded(ValueError):
    pass


class NonDividingDegree(ValueError):
    pass


class CurveError(ValueError):
    pass


def _lcm(a, b):
    return a * b // gcd(a, b)


def _digits(a, p, n):
    out = []
    for _ in range(n):
        out.append(a % p)
        a //= p
    return out


def _undigits(ds, p):
    a = 0
    for d in reversed(ds):
        a = a * p + d
    return a


def _polymulmod(a, b, f, p):
    """a*b mod f over F_p; a, b, f as digit lists (f monic, constant first)."""
    n = len(f) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for i in range(len(prod) - 1, n - 1, -1):
        c = prod[i]
        if c:
            for j in range(n + 1):
                prod[i - n + j] = (prod[i - n + j] - c * f[j]) % p
    return (prod + [0] * n)[:n]


def _is_irreducible(f, p):
    """Brute-force irreducibility over F_p: no monic factor of degree <= deg/2."""
    n = len(f) - 1
    for d in range(1, n // 2 + 1):
        for code in range(p ** d):
            g = _digits(code, p, d) + [1]
            if _polyrem(f, g, p) == [0] * d:
                return False
    return True


def _polyrem(a, g, p):
    a = list(a)
    m = len(g) - 1
    inv = pow(g[-1], p - 2, p)
    for i in range(len(a) - 1, m - 1, -1):
        c = a[i] * inv % p
        if c:
            for j in range(m + 1):
                a[i - m + j] = (a[i - m + j] - c * g[j]) % p
    return (a + [0] * m)[:m]


def lowest_irreducible(p, n):
    """Lexicographically smallest monic irreducible of degree n over F_p."""
    for code in range(p ** n):
        f = _digits(code, p, n) + [1]
        if n == 1 or (f[0] != 0 and _is_irreducible(f, p)):
            return f
    raise CurveError("no irreducible polynomial found")


def _factor_prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            if r != 1:
                raise CurveError("q = %d is not a prime power" % q)
            return p, k
    raise CurveError("q must be >= 2")


class FieldTower:
    """F_q together with the extensions F_{q^n}, n | L, inside F_{q^L}."""

    def __init__(self, q, L):
        self.q = q
        self.p, self.k = _factor_prime_power(q)
        self.L = L
        p, K = self.p, self.k * L
        self.K = K
        self.size = p ** K
        self.modulus = lowest_irreducible(p, K)
        order = self.size - 1
        # log tables from the smallest primitive element
        self.exp = None
        for g in range(2, self.size) if self.size > 2 else [1]:
            exp = self._powers(g)
            if exp is not None:
                self.exp = exp
                break
        if self.exp is None:
            raise CurveError("no primitive element")
        self.log = [None] * self.size
        for i, a in enumerate(self.exp):
            self.log[a] = i
        # Zech logarithms: zech[i] = log(1 + g^i) or None when that is 0
        self.zech = [None] * order
        for i in range(order):
            s = self._add_slow(1, self.exp[i])
            self.zech[i] = self.log[s] if s else None
        self.minus_one = p - 1
        self._embed_base()

    def _powers(self, g):
        p, f = self.p, self.modulus
        gd = _digits(g, p, self.K)
        cur = [1] + [0] * (self.K - 1)
        out = []
        seen = set()
        for _ in range(self.size - 1):
            a = _undigits(cur, p)
            if a in seen:
                return None
            seen.add(a)
            out.append(a)
            cur = _polymulmod(cur, gd, f, p)
        if _undigits(cur, p) != 1:
            return None
        return out

    def _add_slow(self, a, b):
        p = self.p
        if p == 2:
            return a ^ b
        da, db = _digits(a, p, self.K), _digits(b, p, self.K)
        return _undigits([(x + y) % p for x, y in zip(da, db)], p)

    def _embed_base(self):
        """Embed F_q (given by its own lowest irreducible) into the ambient field."""
        if self.k == 1:
            self.base_embed = list(range(self.p))
            return
        f = lowest_irreducible(self.p, self.k)
        root = None
        for a in range(self.size):
            val = 0
            for c in reversed(f):
                val = self.add(self.mul(val, a), c % self.p)
            if val == 0:
                root = a
                break
        self.base_root = root
        table = []
        for code in range(self.q):
            ds = _digits(code, self.p, self.k)
            val = 0
            for c in reversed(ds):
                val = self.add(self.mul(val, root), c)
            table.append(val)
        self.base_embed = table

    # -- arithmetic
    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = self.log[a], self.log[b]
        z = self.zech[(lb - la) % (self.size - 1)]
        if z is None:
            return 0
        return self.exp[(la + z) % (self.size - 1)]

    def neg(self, a):
        if self.p == 2 or a == 0:
            return a
        return self.exp[(self.log[a] + (self.size - 1) // 2) % (self.size - 1)]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.size - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in finite field")
        return self.exp[(-self.log[a]) % (self.size - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if a == 0:
            return 0 if e else 1
        return self.exp[(self.log[a] * e) % (self.size - 1)]

    def const(self, c):
        """Image of the integer c (mod p)."""
        return c % self.p

    def frob(self, a, times=1):
        """a -> a^(q^times)."""
        return self.pow(a, self.q ** times)

    def in_subfield(self, a, n):
        return self.frob(a, n) == a

    def subfield(self, n):
        if self.L % n:
            raise DegreeBoundExceeded("F_{q^%d} is not inside F_{q^%d}" % (n, self.L))
        return [a for a in range(self.size) if self.in_subfield(a, n)]

    def embedding_check(self, m, n, samples=20):
        """Spot-check that F_{q^m} sits in F_{q^n} as a subring (m | n | L)."""
        if n % m or self.L % n:
            raise NonDividingDegree("%d does not divide %d" % (m, n))
        sub = self.subfield(m)[:samples]
        for a in sub:
            for b in sub:
                for c in (self.add(a, b), self.mul(a, b)):
                    if not self.in_subfield(c, m) or not self.in_subfield(c, n):
                        return False
        return True


class ClosedPoint:
    """A Frobenius orbit of geometric points, of size ``degree``."""

    __slots__ = ("degree", "points", "rep", "name")

    def __init__(self, degree, points, name=None):
        pts = tuple(sorted(points, key=point_key))
        self.degree = degree
        self.points = pts
        self.rep = pts[0]
        self.name = name

    def __eq__(self, other):
        return isinstance(other, ClosedPoint) and self.degree == other.degree and self.rep == other.rep

    def __hash__(self):
        return hash((self.degree, self.rep))

    def __lt__(self, other):
        return (self.degree, point_key(self.rep)) < (other.degree, point_key(other.rep))

    def __repr__(self):
        return "ClosedPoint(%s)" % (self.name or "deg %d at %r" % (self.degree, self.rep))

    def __str__(self):
        return self.name or repr(self)


def point_key(pt):
    return (-1, -1) if pt is None else pt


class EllipticCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F_q.

    ``coeffs`` are (a1, a2, a3, a4, a6) as integers naming elements of F_q
    (base-p digits over the lowest irreducible of degree k when q = p^k).
    ``base_point`` is None (the point at infinity) or a pair of such ints.
    """

    def __init__(self, q, coeffs, base_point=None, max_degree=3, name=None):
        if len(coeffs) != 5:
            raise CurveError("need five Weierstrass coefficients a1 a2 a3 a4 a6")
        self.q = q
        self.raw_coeffs = tuple(coeffs)
        self.max_degree = max_degree
        self.L = reduce(_lcm, range(1, max_degree + 1), 1)
        self.F = F = FieldTower(q, self.L)
        for c in coeffs:
            if not 0 <= c < q:
                raise CurveError("coefficient %d is not an element of F_%d" % (c, q))
        self.a1, self.a2, self.a3, self.a4, self.a6 = [F.base_embed[c] for c in coeffs]
        self.name = name or "q%d[%s]" % (q, ",".join(map(str, coeffs)))
        if self.discriminant() == 0:
            raise CurveError("singular curve (zero discriminant)")
        self._all = self._enumerate_ambient()
        if base_point is None:
            self.x0 = None
        else:
            self.x0 = (F.base_embed[base_point[0]], F.base_embed[base_point[1]])
            if self.x0 not in self._all_set:
                raise CurveError("base point %r is not on the curve" % (base_point,))
        self.raw_base_point = base_point
        self._points = {}
        self._closed = {}
        self._N = {}

    # -- field helpers
    def _c(self, c):
        return self.F.const(c)

    def discriminant(self):
        F = self.F
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        m, ad, c = F.mul, F.add, self._c
        b2 = ad(m(a1, a1), m(c(4), a2))
        b4 = ad(m(c(2), a4), m(a1, a3))
        b6 = ad(m(a3, a3), m(c(4), a6))
        b8 = F.sub(ad(ad(m(m(a1, a1), a6), m(c(4), m(a2, a6))), F.neg(m(m(a1, a3), a4))),
                   F.sub(m(a4, a4), ad(m(a2, m(a3, a3)), 0)))
        # b8 = a1^2 a6 + 4 a2 a6 - a1 a3 a4 + a2 a3^2 - a4^2
        b8 = ad(ad(ad(m(m(a1, a1), a6), m(c(4), m(a2, a6))), F.neg(m(m(a1, a3), a4))),
                F.sub(m(a2, m(a3, a3)), m(a4, a4)))
        t1 = F.neg(m(m(b2, b2), b8))
        t2 = F.neg(m(c(8), m(b4, m(b4, b4))))
        t3 = F.neg(m(c(27), m(b6, b6)))
        t4 = m(c(9), m(b2, m(b4, b6)))
        return ad(ad(t1, t2), ad(t3, t4))

    def on_curve(self, pt):
        if pt is None:
            return True
        F = self.F
        x, y = pt
        lhs = F.add(F.add(F.mul(y, y), F.mul(self.a1, F.mul(x, y))), F.mul(self.a3, y))
        return lhs == self._rhs(x)

    def _rhs(self, x):
        F = self.F
        x2 = F.mul(x, x)
        return F.add(F.add(F.mul(x2, x), F.mul(self.a2, x2)), F.add(F.mul(self.a4, x), self.a6))

    def _enumerate_ambient(self):
        F = self.F
        pts = [None]
        if F.p == 2:
            # z^2 + z = w  lookup
            asol = {}
            for z in range(F.size):
                asol.setdefault(F.add(F.mul(z, z), z), []).append(z)
            for x in range(F.size):
                b = F.add(F.mul(self.a1, x), self.a3)
                c = self._rhs(x)
                if b == 0:
                    pts.append((x, F.pow(c, F.size // 2)))
                else:
                    w = F.div(c, F.mul(b, b))
                    for z in asol.get(w, ()):
                        pts.append((x, F.mul(b, z)))
        else:
            roots = {}
            for z in range(F.size):
                roots.setdefault(F.mul(z, z), []).append(z)
            two_inv = F.inv(F.const(2))
            for x in range(F.size):
                b = F.add(F.mul(self.a1, x), self.a3)
                c = self._rhs(x)
                disc = F.add(F.mul(b, b), F.mul(F.const(4), c))
                for s in roots.get(disc, ()):
                    pts.append((x, F.mul(F.sub(s, b), two_inv)))
        for pt in pts:
            assert self.on_curve(pt)
        self._all_set = set(pts)
        return sorted(pts, key=point_key)

    # -- points
    def _check_degree(self, n):
        if n < 1 or self.L % n:
            raise DegreeBoundExceeded("degree %d is outside the configured tower (L=%d)" % (n, self.L))

    def frobenius(self, pt, times=1):
        if pt is None:
            return None
        return (self.F.frob(pt[0], times), self.F.frob(pt[1], times))

    def enumerate_points(self, n):
        """X(F_{q^n}), sorted, including infinity."""
        self._check_degree(n)
        if n not in self._points:
            self._points[n] = [pt for pt in self._all if self.frobenius(pt, n) == pt]
        return self._points[n]

    def N(self, n):
        if n not in self._N:
            self._N[n] = len(self.enumerate_points(n))
        return self._N[n]

    def trace(self):
        return self.q + 1 - self.N(1)

    def hasse_weil_N(self, n):
        """N_n from N_1 via s_n = sigma^n + sigmabar^n."""
        a = self.trace()
        s_prev, s = 2, a
        for _ in range(n - 1):
            s_prev, s = s, a * s - self.q * s_prev
        return self.q ** n + 1 - s

    def symbolic_N(self, n):
        """N_n as a Laurent polynomial in v, with q written as v^-2.

        The Hall algebra relations only close up when the c_i see q and v
        as the same quantity, so the towers use these instead of integers."""
        return symbolic_point_count(self.trace(), n)

    def degree_of(self, pt):
        n = 1
        while self.frobenius(pt, n) != pt:
            n += 1
        return n

    def closed_points(self, max_degree=None):
        """All closed points of degree <= max_degree (degrees must divide L)."""
        max_degree = max_degree or self.max_degree
        out = []
        for e in range(1, max_degree + 1):
            out.extend(self.closed_points_of_degree(e))
        return out

    def closed_points_of_degree(self, e):
        self._check_degree(e)
        if e not in self._closed:
            seen = set()
            cps = []
            for pt in self.enumerate_points(e):
                if pt in seen:
                    continue
                orbit = [pt]
                nxt = self.frobenius(pt)
                while nxt != pt:
                    orbit.append(nxt)
                    nxt = self.frobenius(nxt)
                seen.update(orbit)
                if len(orbit) == e:
                    cps.append(ClosedPoint(e, orbit))
            cps.sort()
            for i, cp in enumerate(cps):
                cp.name = self._point_name(cp, i)
            self._closed[e] = cps
        return self._closed[e]

    def _point_name(self, cp, i):
        if cp.degree == 1 and cp.rep == self.x0:
            return "x0"
        return "p%d.%d" % (cp.degree, i)

    def closed_point_of(self, pt):
        e = self.degree_of(pt)
        for cp in self.closed_points_of_degree(e):
            if pt in cp.points:
                return cp
        raise CurveError("point not found among closed points")

    def closed_point_by_name(self, name):
        for e in range(1, self.max_degree + 1):
            for cp in self.closed_points_of_degree(e):
                if cp.name == name:
                    return cp
        raise CurveError("unknown closed point %r" % name)

    @property
    def base_closed_point(self):
        return self.closed_point_of(self.x0)

    # -- group law
    def _neg_std(self, pt):
        if pt is None:
            return None
        F = self.F
        x, y = pt
        return (x, F.neg(F.add(F.add(y, F.mul(self.a1, x)), self.a3)))

    def _add_std(self, P, Q):
        """Chord-tangent law with the point at infinity as identity."""
        if P is None:
            return Q
        if Q is None:
            return P
        F = self.F
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2 and F.add(F.add(y1, y2), F.add(F.mul(self.a1, x2), self.a3)) == 0:
            return None
        c = self._c
        if x1 != x2:
            dx = F.sub(x2, x1)
            lam = F.div(F.sub(y2, y1), dx)
            nu = F.div(F.sub(F.mul(y1, x2), F.mul(y2, x1)), dx)
        else:
            den = F.add(F.add(F.mul(c(2), y1), F.mul(self.a1, x1)), self.a3)
            num = F.sub(F.add(F.add(F.mul(c(3), F.mul(x1, x1)), F.mul(F.mul(c(2), self.a2), x1)), self.a4),
                        F.mul(self.a1, y1))
            lam = F.div(num, den)
            num2 = F.sub(F.add(F.add(F.neg(F.mul(x1, F.mul(x1, x1))), F.mul(self.a4, x1)),
                               F.mul(c(2), self.a6)), F.mul(self.a3, y1))
            nu = F.div(num2, den)
        x3 = F.sub(F.sub(F.sub(F.add(F.mul(lam, lam), F.mul(self.a1, lam)), self.a2), x1), x2)
        y3 = F.sub(F.neg(F.mul(F.add(lam, self.a1), x3)), F.add(nu, self.a3))
        return (x3, y3)

    def group_add(self, a, b, n=None):
        """a (+) b with x0 as the neutral element."""
        return self._add_std(self._add_std(a, b), self._neg_std(self.x0))

    def group_neg(self, a):
        """(-)a: the inverse for the x0-centred law, i.e. 2 x0 - a."""
        return self._add_std(self._add_std(self.x0, self.x0), self._neg_std(a))

    def group_mul(self, k, a):
        if k < 0:
            return self.group_mul(-k, self.group_neg(a))
        out = self.x0
        base = a
        while k:
            if k & 1:
                out = self.group_add(out, base)
            base = self.group_add(base, base)
            k >>= 1
        return out

    def point_norm(self, pt, n, m):
        """Norm_m^n(pt) = (+)_{i < n/m} Fr^{m i}(pt), for pt over F_{q^n}."""
        if n % m:
            raise NonDividingDegree("%d does not divide %d" % (m, n))
        out = self.x0
        cur = pt
        for _ in range(n // m):
            out = self.group_add(out, cur)
            cur = self.frobenius(cur, m)
        return out

    def describe(self):
        return {"q": self.q, "coeffs": list(self.raw_coeffs),
                "base_point": None if self.raw_base_point is None else list(self.raw_base_point)}


# the three curves with a single rational point
def one_point_curve(q, max_degree=3):
    if q == 2:
        return EllipticCurve(2, (0, 0, 1, 1, 1), max_degree=max_degree, name="X_2")
    if q == 3:
        return EllipticCurve(3, (0, 0, 0, 2, 2), max_degree=max_degree, name="X_3")
    if q == 4:
        # F_4 = F_2(alpha), alpha^2 + alpha + 1 = 0, alpha encoded as 2
        return EllipticCurve(4, (0, 0, 1, 0, 2), max_degree=max_degree, name="X_4")
    raise CurveError("no one-point curve tabulated for q = %d" % q)


def symbolic_point_count(a, n):
    """q^n + 1 - (sigma^n + sigmabar^n) with sigma + sigmabar = a, sigma sigmabar = q = v^-2."""
    Q = vpow(-2)
    s_prev, s = RationalFunctionV.const(2), RationalFunctionV.const(a)
    for _ in range(n - 1):
        s_prev, s = s, s * a - Q * s_prev
    return Q ** n + ONE - s
