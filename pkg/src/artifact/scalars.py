"""Exact coefficient arithmetic.

RationalFunctionV is an element of Q(v).  The representation is

    v^shift * (integer polynomial) / (positive integer * product of irreducibles)

where the irreducible factors are primitive integer polynomials with
positive leading coefficient, kept as a sorted tuple of (factor, power).
Almost every denominator that occurs in the Hall algebra computations is a
product of cyclotomic polynomials, so factoring a divisor tries those
first and only falls back to a general factorisation for anything else.

CycloScalar adjoins a primitive M-th root of unity, stored in the power
basis modulo the M-th cyclotomic polynomial.
"""

from fractions import Fraction
from functools import lru_cache
from math import gcd


class OddPowerPresent(ValueError):
    pass


# ---------------------------------------------------------------------------
# dense integer polynomials (tuples, constant term first)

def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] += y
    return _trim(out)


def _pscale(a, k):
    return tuple(k * x for x in a) if k else ()


def _pdivexact(a, f):
    """Quotient a/f over Z, or None when f does not divide a."""
    n, m = len(a), len(f)
    if n < m:
        return None
    rem = list(a)
    q = [0] * (n - m + 1)
    lead = f[-1]
    for i in range(n - m, -1, -1):
        c = rem[i + m - 1]
        if c == 0:
            continue
        if c % lead:
            return None
        k = c // lead
        q[i] = k
        for j in range(m):
            rem[i + j] -= k * f[j]
    if any(rem[:m - 1]):
        return None
    return tuple(q)


def _content(a):
    g = 0
    for x in a:
        g = gcd(g, x)
    return g


def _ppow(a, k):
    out = (1,)
    for _ in range(k):
        out = _pmul(out, a)
    return out


@lru_cache(maxsize=None)
def cyclotomic(j):
    """Phi_j as a coefficient tuple."""
    num = [-1] + [0] * (j - 1) + [1]
    poly = tuple(num)
    for d in range(1, j):
        if j % d == 0:
            poly = _pdivexact(poly, cyclotomic(d))
    return poly


@lru_cache(maxsize=4096)
def _factor(poly):
    """Factor a primitive polynomial with nonzero constant term.

    Returns (unit, ((factor, power), ...)) with unit = +-1.
    """
    unit = 1
    if poly[-1] < 0:
        unit = -1
        poly = tuple(-x for x in poly)
    facs = {}
    rest = poly
    j = 1
    while len(rest) > 1 and j <= 4 * len(rest) * len(rest) + 8:
        phi = cyclotomic(j)
        if len(phi) <= len(rest):
            while True:
                q = _pdivexact(rest, phi)
                if q is None:
                    break
                facs[phi] = facs.get(phi, 0) + 1
                rest = q
        j += 1
    if len(rest) > 1:
        # something that is not a product of cyclotomics: let sympy do it
        import sympy
        x = sympy.Symbol("v")
        expr = sum(c * x ** i for i, c in enumerate(rest))
        c0, flist = sympy.factor_list(expr, x)
        if c0 < 0:
            unit = -unit
        for f, k in flist:
            co = tuple(int(c) for c in reversed(sympy.Poly(f, x).all_coeffs()))
            if co[-1] < 0:
                co = tuple(-c for c in co)
                if k % 2:
                    unit = -unit
            facs[co] = facs.get(co, 0) + k
        rest = (1,)
    if rest != (1,):
        # a leftover constant +-1
        if rest == (-1,):
            unit = -unit
    return unit, tuple(sorted(facs.items()))


# ---------------------------------------------------------------------------

class RationalFunctionV:
    """An element of Q(v) in canonical reduced form."""

    __slots__ = ("shift", "num", "den", "facs", "_hash")

    def __init__(self, shift=0, num=(), den=1, facs=(), _reduced=False):
        if _reduced:
            self.shift, self.num, self.den, self.facs = shift, num, den, facs
        else:
            self.shift, self.num, self.den, self.facs = _reduce(shift, _trim(num), den, dict(facs))
        self._hash = None

    # -- constructors
    @classmethod
    def const(cls, c):
        c = Fraction(c)
        if c == 0:
            return ZERO
        return cls(0, (c.numerator,), c.denominator)

    @classmethod
    def monomial(cls, k, c=1):
        c = Fraction(c)
        if c == 0:
            return ZERO
        return cls(k, (c.numerator,), c.denominator)

    @classmethod
    def laurent(cls, coeffs):
        """From a dict {exponent: rational}."""
        coeffs = {k: Fraction(c) for k, c in coeffs.items() if c}
        if not coeffs:
            return ZERO
        lo, hi = min(coeffs), max(coeffs)
        den = 1
        for c in coeffs.values():
            den = den * c.denominator // gcd(den, c.denominator)
        poly = [0] * (hi - lo + 1)
        for k, c in coeffs.items():
            poly[k - lo] = int(c * den)
        return cls(lo, tuple(poly), den)

    @classmethod
    def from_polys(cls, num, den):
        """num, den: coefficient sequences (constant first) of integer polys."""
        a = cls(0, tuple(int(c) for c in num))
        b = cls(0, tuple(int(c) for c in den))
        return a / b

    @classmethod
    def parse(cls, text):
        """Parse an expression in v such as '(v^2+1)/(2*v)'."""
        import sympy
        v = sympy.Symbol("v")
        expr = sympy.sympify(text.replace("^", "**"), locals={"v": v, "q": v ** -2})
        num, den = sympy.fraction(sympy.together(expr))
        pn, pd = sympy.Poly(num, v), sympy.Poly(den, v)
        out = cls.from_polys([], [1]) if pn.is_zero else None
        if out is not None:
            return ZERO
        n = tuple(sympy.Rational(c) for c in reversed(pn.all_coeffs()))
        d = tuple(sympy.Rational(c) for c in reversed(pd.all_coeffs()))
        scale = 1
        for c in n + d:
            scale = scale * int(c.q) // gcd(scale, int(c.q))
        return cls.from_polys([int(c * scale) for c in n], [int(c * scale) for c in d])

    # -- structure
    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def key(self):
        return (self.shift, self.num, self.den, self.facs)

    def __eq__(self, other):
        if not isinstance(other, RationalFunctionV):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def numerator(self):
        """(shift-free) integer numerator coefficients, constant first."""
        if self.shift >= 0:
            return (0,) * self.shift + self.num
        return self.num

    def denominator(self):
        d = (self.den,)
        for f, k in self.facs:
            d = _pmul(d, _ppow(f, k))
        if self.shift < 0:
            d = (0,) * (-self.shift) + d
        return d

    def is_laurent(self):
        return not self.facs and self.den == 1

    def laurent_coeffs(self):
        """{exponent: Fraction} when the denominator is a monomial."""
        if self.facs:
            raise ValueError("not a Laurent polynomial: %r" % self)
        return {self.shift + i: Fraction(c, self.den) for i, c in enumerate(self.num) if c}

    # -- arithmetic
    def __neg__(self):
        return RationalFunctionV(self.shift, tuple(-c for c in self.num), self.den, self.facs, _reduced=True)

    def __add__(self, other):
        if not isinstance(other, RationalFunctionV):
            other = as_scalar(other)
        if not self.num:
            return other
        if not other.num:
            return self
        fa, fb = dict(self.facs), dict(other.facs)
        common = dict(fa)
        for f, k in fb.items():
            if common.get(f, 0) < k:
                common[f] = k
        den = self.den * other.den // gcd(self.den, other.den)
        na = self._lift(fa, common, den // self.den)
        nb = other._lift(fb, common, den // other.den)
        lo = min(self.shift, other.shift)
        na = (0,) * (self.shift - lo) + na
        nb = (0,) * (other.shift - lo) + nb
        return RationalFunctionV(lo, _padd(na, nb), den, common)

    def _lift(self, have, want, scale):
        poly = _pscale(self.num, scale)
        for f, k in want.items():
            extra = k - have.get(f, 0)
            if extra:
                poly = _pmul(poly, _ppow(f, extra))
        return poly

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, RationalFunctionV):
            other = as_scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return as_scalar(other) - self

    def __mul__(self, other):
        if not isinstance(other, RationalFunctionV):
            if isinstance(other, (int, Fraction)):
                return self._scale(Fraction(other))
            other = as_scalar(other)
        if not self.num or not other.num:
            return ZERO
        facs = dict(self.facs)
        for f, k in other.facs:
            facs[f] = facs.get(f, 0) + k
        return RationalFunctionV(self.shift + other.shift, _pmul(self.num, other.num),
                                 self.den * other.den, facs)

    __rmul__ = __mul__

    def _scale(self, c):
        if c == 0 or not self.num:
            return ZERO
        num = _pscale(self.num, c.numerator)
        den = self.den * c.denominator
        g = gcd(_content(num), den)
        return RationalFunctionV(self.shift, tuple(x // g for x in num), den // g,
                                 self.facs, _reduced=True)

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        c = _content(self.num)
        prim = tuple(x // c for x in self.num)
        unit, flist = _factor(prim)
        num = (self.den * unit,)
        for f, k in self.facs:
            num = _pmul(num, _ppow(f, k))
        return RationalFunctionV(-self.shift, num, c, flist)

    def __truediv__(self, other):
        if not isinstance(other, RationalFunctionV):
            if isinstance(other, (int, Fraction)):
                return self._scale(1 / Fraction(other))
            other = as_scalar(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_scalar(other) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- evaluation
    def evaluate(self, x):
        """Exact value at a rational (or other numeric) point x."""
        x = Fraction(x) if isinstance(x, (int, Fraction)) else x
        n = sum(c * x ** i for i, c in enumerate(self.num))
        d = self.den
        for f, k in self.facs:
            d = d * sum(c * x ** i for i, c in enumerate(f)) ** k
        return n * x ** self.shift / d

    def substitute_neg(self):
        """f(-v)."""
        return _from_num_den(_flip(self.numerator()), _flip(self.denominator()))

    def __repr__(self):
        return "RationalFunctionV(%s)" % self

    def __str__(self):
        numer = _poly_str(self.num, self.shift)
        if self.is_laurent() and self.den == 1:
            return numer
        dparts = []
        if self.den != 1:
            dparts.append(str(self.den))
        for f, k in self.facs:
            s = "(" + _poly_str(f, 0) + ")"
            dparts.append(s if k == 1 else s + "^%d" % k)
        return "(%s)/(%s)" % (numer, "*".join(dparts))


def _flip(poly):
    return tuple(c if i % 2 == 0 else -c for i, c in enumerate(poly))


def _from_num_den(num, den):
    return RationalFunctionV(0, num) / RationalFunctionV(0, den)


def _poly_str(coeffs, shift):
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        e = i + shift
        mono = "" if e == 0 else ("v" if e == 1 else "v^%d" % e)
        if mono and abs(c) == 1:
            s = mono
        elif mono:
            s = "%d*%s" % (abs(c), mono)
        else:
            s = str(abs(c))
        terms.append(("-" if c < 0 else "+", s))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, s in terms[1:]:
        out += " %s %s" % (sign, s)
    return out


def _reduce(shift, num, den, facs):
    if not num:
        return 0, (), 1, ()
    lo = 0
    while num[lo] == 0:
        lo += 1
    if lo:
        num = num[lo:]
        shift += lo
    out = {}
    for f, k in facs.items():
        while k:
            q = _pdivexact(num, f)
            if q is None:
                break
            num = q
            k -= 1
        if k:
            out[f] = k
    g = gcd(_content(num), den)
    if den < 0:
        g = -g
    if g != 1:
        num = tuple(x // g for x in num)
        den //= g
    return shift, num, den, tuple(sorted(out.items()))


ZERO = RationalFunctionV(0, (), 1, (), _reduced=True)
ONE = RationalFunctionV(0, (1,), 1, (), _reduced=True)
V = RationalFunctionV(1, (1,), 1, (), _reduced=True)


def as_scalar(x):
    if isinstance(x, RationalFunctionV):
        return x
    if isinstance(x, (int, Fraction)):
        return RationalFunctionV.const(x)
    raise TypeError("cannot coerce %r to RationalFunctionV" % (x,))


def vpow(k):
    return RationalFunctionV.monomial(k)


@lru_cache(maxsize=None)
def qint(s):
    """Symmetric quantum integer [s] = (v^s - v^-s)/(v - v^-1)."""
    if s < 0:
        raise ValueError("qint needs s >= 0")
    return RationalFunctionV.laurent({s - 1 - 2 * i: 1 for i in range(s)})


def c_coeff(i, n_i):
    """c_i = v^i [i] N_i / i."""
    if i < 1:
        raise ValueError("c_coeff needs i >= 1")
    return vpow(i) * qint(i) * as_scalar(n_i) * Fraction(1, i)


def alpha(n):
    """n (v^-1 - v), the normalising constant of the theta series in tower n."""
    return RationalFunctionV.laurent({-1: n, 1: -n})


def eval_at_curve(s, q):
    """Value of s at v^2 = 1/q, insisting that s is even in v."""
    s = as_scalar(s)
    if not s:
        return Fraction(0)
    if s.substitute_neg() != s:
        raise OddPowerPresent("odd power of v in %s" % s)
    num = s.numerator()
    den = s.denominator()
    # multiply through by den(-v) so that both parts are polynomials in v^2
    dneg = _flip(den)
    num, den = _pmul(num, dneg), _pmul(den, dneg)
    if any(c for c in num[1::2]) or any(c for c in den[1::2]):
        raise OddPowerPresent("odd power of v in %s" % s)
    w = Fraction(1, q)
    n = sum(c * w ** (i // 2) for i, c in enumerate(num) if i % 2 == 0)
    d = sum(c * w ** (i // 2) for i, c in enumerate(den) if i % 2 == 0)
    return n / d


# ---------------------------------------------------------------------------
# cyclotomic extension

@lru_cache(maxsize=None)
def _power_table(m):
    """zeta_M^k in the power basis, for k in range(M)."""
    phi = cyclotomic(m)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(m):
        rows.append(tuple(cur))
        # multiply by zeta: shift and reduce with zeta^deg = -sum phi_i zeta^i
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(deg):
                cur[i] -= top * phi[i]
    return tuple(rows)


def euler_phi(m):
    return len(cyclotomic(m)) - 1


class CycloScalar:
    """Polynomial in zeta_M with RationalFunctionV coefficients, reduced mod Phi_M."""

    __slots__ = ("M", "coeffs")

    def __init__(self, M, coeffs):
        deg = euler_phi(M)
        coeffs = [as_scalar(c) for c in coeffs]
        if len(coeffs) > deg:
            table = _power_table(M)
            red = [ZERO] * deg
            for k, c in enumerate(coeffs):
                if c:
                    row = table[k % M]
                    for i, a in enumerate(row):
                        if a:
                            red[i] = red[i] + c * a
            coeffs = red
        coeffs = coeffs + [ZERO] * (deg - len(coeffs))
        self.M = M
        self.coeffs = tuple(coeffs)

    @classmethod
    def scalar(cls, s, M=1):
        return cls(M, [as_scalar(s)])

    @classmethod
    def root(cls, M, k):
        row = _power_table(M)[k % M]
        return cls(M, [RationalFunctionV.const(a) for a in row])

    def lift(self, M):
        """Re-express in a larger conductor M (a multiple of self.M)."""
        if M % self.M:
            raise ValueError("conductor %d does not divide %d" % (self.M, M))
        step = M // self.M
        coeffs = [ZERO] * M
        for i, c in enumerate(self.coeffs):
            coeffs[i * step] = c
        return CycloScalar(M, coeffs)

    def _common(self, other):
        if not isinstance(other, CycloScalar):
            other = CycloScalar.scalar(other, self.M)
        if other.M == self.M:
            return self, other
        m = self.M * other.M // gcd(self.M, other.M)
        return self.lift(m), other.lift(m)

    def __add__(self, other):
        a, b = self._common(other)
        return CycloScalar(a.M, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloScalar(self.M, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, CycloScalar) else -as_scalar(other))

    def __mul__(self, other):
        a, b = self._common(other)
        prod = [ZERO] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] = prod[i + j] + x * y
        return CycloScalar(a.M, prod)

    __rmul__ = __mul__

    def __eq__(self, other):
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash((self.M, self.coeffs))

    def is_rational(self):
        return all(not c for c in self.coeffs[1:])

    def to_rational(self):
        if not self.is_rational():
            raise ValueError("cyclotomic value is not in Q(v): %r" % (self,))
        return self.coeffs[0]

    def __repr__(self):
        parts = ["(%s)*z^%d" % (c, i) for i, c in enumerate(self.coeffs) if c]
        return "CycloScalar(M=%d, %s)" % (self.M, " + ".join(parts) or "0")


class GroupRingQ:
    """Rational combination of M-th roots of unity, sum_k c_k zeta^k.

    A light carrier for character sums; value() maps into Q once the sum is
    known to be Galois invariant.
    """

    __slots__ = ("M", "c")

    def __init__(self, M, c=None):
        self.M = M
        self.c = c or {}

    @classmethod
    def root(cls, M, k, coef=1):
        return cls(M, {k % M: Fraction(coef)})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GroupRingQ(self.M, {k: a * other for k, a in self.c.items()})
        M = self.M
        out = {}
        for k, a in self.c.items():
            for l, b in other.c.items():
                s = (k + l) % M
                out[s] = out.get(s, 0) + a * b
        return GroupRingQ(M, {k: a for k, a in out.items() if a})

    def add_into(self, other, scale=1):
        for k, a in other.c.items():
            self.c[k] = self.c.get(k, 0) + a * scale

    def value(self):
        """The rational number this element represents (asserted rational)."""
        if not self.c:
            return Fraction(0)
        table = _power_table(self.M)
        deg = len(table[0])
        acc = [Fraction(0)] * deg
        for k, a in self.c.items():
            if a:
                for i, x in enumerate(table[k]):
                    if x:
                        acc[i] += a * x
        if any(acc[1:]):
            raise ValueError("character sum is not rational")
        return acc[0]

    def to_cyclo(self):
        coeffs = [ZERO] * self.M
        for k, a in self.c.items():
            coeffs[k] = coeffs[k] + RationalFunctionV.const(a)
        return CycloScalar(self.M, coeffs)
