"""Coherent sheaves on the curve as multisets of labelled indecomposables.

An indecomposable is E^{(n,d)}_{(x,l)}: class (n, d), support closed point x,
weight l, with |x| * l = gcd(n, d).  Torsion pieces have n = 0.
"""

from fractions import Fraction
from itertools import combinations_with_replacement
from math import gcd


class ConeViolation(ValueError):
    pass


class CollinearInput(ValueError):
    pass


class LabelError(ValueError):
    pass


INF = float("inf")


# -- lattice vectors (plain int pairs)
def in_cone(v):
    n, d = v
    return n > 0 or (n == 0 and d > 0)


def kvector(n, d):
    if not in_cone((n, d)):
        raise ConeViolation("(%d, %d) is outside the cone" % (n, d))
    return (n, d)


def gamma(v):
    return gcd(v[0], v[1])


def slope(v):
    return INF if v[0] == 0 else Fraction(v[1], v[0])


def euler_form(F, G):
    """<F, G> = rk F deg G - rk G deg F."""
    return F[0] * G[1] - G[0] * F[1]


def det(v, w):
    return v[0] * w[1] - v[1] * w[0]


def pick_interior_count(v, w):
    """Interior lattice points of the triangle 0, v, v+w (Pick)."""
    D = abs(det(v, w))
    if D == 0:
        raise CollinearInput("%r and %r are collinear" % (v, w))
    s = (v[0] + w[0], v[1] + w[1])
    I2 = D - gamma(v) - gamma(w) - gamma(s) + 2
    assert I2 >= 0 and I2 % 2 == 0
    return I2 // 2


def pick_interior_bruteforce(v, w):
    """Same count by scanning the triangle with vertices 0, v, v+w."""
    s = (v[0] + w[0], v[1] + w[1])
    pts = [(0, 0), v, s]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    cnt = 0
    for X in range(min(xs), max(xs) + 1):
        for Y in range(min(ys), max(ys) + 1):
            signs = []
            for a, b in ((pts[0], pts[1]), (pts[1], pts[2]), (pts[2], pts[0])):
                signs.append((b[0] - a[0]) * (Y - a[1]) - (b[1] - a[1]) * (X - a[0]))
            if all(s_ > 0 for s_ in signs) or all(s_ < 0 for s_ in signs):
                cnt += 1
    return cnt


def _egcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def sl2_to_vertical(n, d):
    """Integer matrix of determinant 1 sending (n, d) to (0, gcd(n, d))."""
    if n == 0 and d == 0:
        raise ValueError("zero vector")
    if n == 0 and d > 0:
        return ((1, 0), (0, 1))
    g, a, b = _egcd(n, d)
    f = ((d // g, -n // g), (a, b))
    assert f[0][0] * f[1][1] - f[0][1] * f[1][0] == 1
    assert apply(f, (n, d)) == (0, g)
    return f


def apply(f, v):
    return (f[0][0] * v[0] + f[0][1] * v[1], f[1][0] * v[0] + f[1][1] * v[1])


def inverse(f):
    (a, b), (c, d) = f
    return ((d, -b), (-c, a))


def matmul(f, g):
    return tuple(tuple(sum(f[i][k] * g[k][j] for k in range(2)) for j in range(2)) for i in range(2))


# -- sheaves
class IndecompSheaf:
    __slots__ = ("n", "d", "point", "weight")

    def __init__(self, n, d, point, weight):
        if not in_cone((n, d)):
            raise ConeViolation("(%d, %d) is outside the cone" % (n, d))
        if point.degree * weight != gcd(n, d):
            raise LabelError("|x| * l = %d * %d != gcd(%d, %d)" % (point.degree, weight, n, d))
        self.n, self.d, self.point, self.weight = n, d, point, weight

    @property
    def cls(self):
        return (self.n, self.d)

    @property
    def slope(self):
        return slope(self.cls)

    def key(self):
        return (self.n == 0, self.slope if self.n else 0, self.n, self.d,
                self.point.degree, str(self.point), self.weight)

    def __eq__(self, other):
        return isinstance(other, IndecompSheaf) and (self.n, self.d, self.point, self.weight) == (
            other.n, other.d, other.point, other.weight)

    def __hash__(self):
        return hash((self.n, self.d, self.point, self.weight))

    def __lt__(self, other):
        return self.key() < other.key()

    def relabel(self, f):
        n, d = apply(f, self.cls)
        if not in_cone((n, d)):
            raise ConeViolation("image (%d, %d) is outside the cone" % (n, d))
        return IndecompSheaf(n, d, self.point, self.weight)

    def __str__(self):
        return "E(%d,%d)[%s,%d]" % (self.n, self.d, self.point, self.weight)

    __repr__ = __str__


class CoherentSheaf:
    """Direct sum of indecomposables, kept as a sorted tuple."""

    __slots__ = ("parts", "_hash")

    def __init__(self, parts):
        self.parts = tuple(sorted(parts))
        self._hash = hash(self.parts)

    def __eq__(self, other):
        return isinstance(other, CoherentSheaf) and self.parts == other.parts

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (self.rank, self.degree, [p.key() for p in self.parts])

    @property
    def rank(self):
        return sum(p.n for p in self.parts)

    @property
    def degree(self):
        return sum(p.d for p in self.parts)

    @property
    def cls(self):
        return (self.rank, self.degree)

    def is_vector_bundle(self):
        return all(p.n > 0 for p in self.parts)

    def __add__(self, other):
        return CoherentSheaf(self.parts + other.parts)

    def __str__(self):
        return " + ".join(str(p) for p in self.parts) or "0"

    __repr__ = __str__

    def relabel(self, f):
        return CoherentSheaf(p.relabel(f) for p in self.parts)

    def hn_slopes(self):
        return sorted({p.slope for p in self.parts})


def sheaf(*parts):
    return CoherentSheaf(parts)


def hn_decompose(E):
    """[(slope, semistable piece)] by increasing slope, torsion last."""
    groups = {}
    for p in E.parts:
        groups.setdefault(p.slope, []).append(p)
    return [(s, CoherentSheaf(groups[s])) for s in sorted(groups)]


def atiyah_relabel(component, f):
    return component.relabel(f)


# -- convex paths and the polygon
def path_of(E):
    """HN path: list of class vectors of the semistable pieces, slopes increasing."""
    return [piece.cls for _, piece in hn_decompose(E)]


def _path_fn(path):
    """Breakpoints [(X, Y)] of a path starting at the origin."""
    pts = [(0, 0)]
    for n, d in path:
        X, Y = pts[-1]
        pts.append((X + n, Y + d))
    return pts


def _eval(pts, X):
    for (x1, y1), (x2, y2) in zip(pts, pts[1:]):
        if x1 <= X <= x2 and x2 > x1:
            return Fraction(y1) + Fraction(y2 - y1, x2 - x1) * (X - x1)
    if X == pts[-1][0]:
        return Fraction(pts[-1][1])
    return Fraction(pts[0][1])


def polygon_contains(E, x_degree, r, path, tight=False):
    """Is `path` inside P(x, r, E): under p(E) and above p(E) lowered by r|x|
    (no lowering at X = 0).  With tight=True the lowering at rank X is
    min(X, r)|x|, which also holds for every subsheaf containing E(-x)."""
    top = _path_fn(path_of(E))
    cand = _path_fn(path)
    n = top[-1][0]
    if cand[-1] != (n, top[-1][1] - r * x_degree):
        return False
    # both bounds and the path are linear between integer ranks
    for X in range(n + 1):
        up = _eval(top, X)
        y = _eval(cand, X)
        drop = 0 if X == 0 else (min(X, r) if tight else r) * x_degree
        if y > up or y < up - drop:
            return False
    return True


# -- enumeration
def _classes_of_rank(n, degree, lo, hi):
    """Multisets of vector classes (n_i, d_i), sum = (n, degree), slopes in [lo, hi]."""
    out = []

    def rec(rem_n, rem_d, maxkey, acc):
        if rem_n == 0:
            if rem_d == 0:
                out.append(tuple(acc))
            return
        for ni in range(1, rem_n + 1):
            for di in range(int(_ceil(lo * ni)), int(_floor(hi * ni)) + 1):
                key = (Fraction(di, ni), ni, di)
                if maxkey is not None and key > maxkey:
                    continue
                rest_n = rem_n - ni
                rest_d = rem_d - di
                if rest_n == 0 and rest_d != 0:
                    continue
                if rest_n and not (lo * rest_n <= rest_d <= hi * rest_n):
                    continue
                rec(rest_n, rest_d, key, acc + [(ni, di)])

    rec(n, degree, None, [])
    return out


def _ceil(x):
    return -((-Fraction(x).numerator) // Fraction(x).denominator)


def _floor(x):
    return Fraction(x).numerator // Fraction(x).denominator


def labels_for_class(curve, n, d):
    """All (point, weight) with |x| * l = gcd(n, d)."""
    g = gcd(n, d)
    out = []
    for e in range(1, g + 1):
        if g % e == 0:
            for cp in curve.closed_points_of_degree(e):
                out.append((cp, g // e))
    return out


def enumerate_bundles(curve, n, degree, lo, hi):
    """All rank-n vector bundles of the given degree with HN slopes in [lo, hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    result = set()
    for classes in _classes_of_rank(n, degree, lo, hi):
        choices = []
        for cl in sorted(set(classes)):
            k = classes.count(cl)
            labs = [IndecompSheaf(cl[0], cl[1], cp, w) for cp, w in labels_for_class(curve, *cl)]
            choices.append(list(combinations_with_replacement(labs, k)))
        _product_into(choices, [], result)
    return sorted(result)


def _product_into(choices, acc, out):
    if not choices:
        out.add(CoherentSheaf(acc))
        return
    for c in choices[0]:
        _product_into(choices[1:], acc + list(c), out)


def bundles_in_window(curve, n, lo, hi):
    """All rank-n bundles whose HN slopes lie in [lo, hi]."""
    out = []
    for deg in range(n * lo, n * hi + 1):
        out.extend(enumerate_bundles(curve, n, deg, lo, hi))
    return out


# -- rank-2 names
def line_bundle(curve, d, point):
    return IndecompSheaf(1, d, point, 1)


def classify_rank2(E):
    """'dec', 'tr' or 'gi' for a rank-2 bundle."""
    if len(E.parts) == 2:
        return "dec"
    (p,) = E.parts
    if p.d % 2 == 0 and p.point.degree == 2:
        return "tr"
    return "gi"


def display_name(E):
    """Names in the style of the rank-2 classification, with tuple labels."""
    if E.rank == 1:
        (p,) = E.parts
        return "L(%d,%s)" % (p.d, p.point)
    if E.rank != 2:
        return str(E)
    kind = classify_rank2(E)
    if kind == "dec":
        a, b = E.parts
        return "L(%d,%s)+L(%d,%s)" % (a.d, a.point, b.d, b.point)
    (p,) = E.parts
    if kind == "tr":
        return "pi_*(L'[%s]) deg %d" % (p.point, p.d)
    if p.d % 2 == 0:
        return "E(L(%d,%s))" % (p.d // 2, p.point)
    return "E_x(%d,%s)" % (p.d, p.point)


def enumerate_bun2_vertices(curve, lo, hi):
    """Rank-2 bundles with HN slopes in [lo, hi], paired with display names."""
    return [(E, display_name(E)) for E in bundles_in_window(curve, 2, lo, hi)]
