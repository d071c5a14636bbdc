"""Normal ordering in the path algebras E^m and in the dressed Hall algebra.

Inside one tower E^m an expression is a dict {word: scalar}; a word is a
tuple of lattice vectors (t_{v1} t_{v2} ...).  Normal words have slopes
nondecreasing left to right (vertical last); equal-slope letters commute and
are kept sorted.

Brackets of non-collinear generators:
  * empty triangle and one primitive vector: relation (2) directly;
  * otherwise pick one of the two vectors z, write alpha t_z through theta_z
    minus its nonlinear part, write theta_z as a bracket [t_w, t_v] of an
    empty split z = v + w, and expand with the Jacobi identity.  Every
    spawned bracket sits on a strictly smaller sub-triangle at first level.
Results are memoised per tower.  A pair reached again while being computed
is a cycle; the caller then tries the next split.
"""

import random
import sys
from collections import Counter
from fractions import Fraction
from math import factorial

from .scalars import ONE, RationalFunctionV, alpha, as_scalar, c_coeff
from .sheaves import det, gamma, in_cone, pick_interior_count
from .symfunc import partitions

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class UnsupportedRelation(RuntimeError):
    pass


class NotAGeneratorOfAnyTower(ValueError):
    pass


class StepBudgetExceeded(RuntimeError):
    pass


class _Cycle(Exception):
    pass


def vkey(v):
    """Total order on letters: by slope (vertical last), then rank."""
    n, d = v
    if n == 0:
        return (1, 0, 0, d)
    return (0, Fraction(d, n), n, d)


def is_normal(word):
    return all(vkey(a) <= vkey(b) for a, b in zip(word, word[1:]))


def _add_into(acc, expr, scale=ONE):
    for w, c in expr.items():
        s = acc.get(w)
        s = c * scale if s is None else s + c * scale
        if s:
            acc[w] = s
        else:
            acc.pop(w, None)
    return acc


def _scale(expr, s):
    if not s:
        return {}
    return {w: c * s for w, c in expr.items()}


def theta_terms(g):
    """[(partition, 1/prod m_k!)] for the s^g coefficient of exp(a sum t_i s^i)."""
    out = []
    for lam in partitions(g):
        den = 1
        for mult in Counter(lam).values():
            den *= factorial(mult)
        out.append((lam, Fraction(1, den)))
    return out


class Tower:
    """The algebra E^m with constants c_{m k} (from the curve counts) and
    alpha_m = m (v^-1 - v)."""

    def __init__(self, m, N, gamma2="derive", gamma2_constant=None,
                 step_budget=2_000_000, seed=None):
        self.m = m
        self.N = N  # callable: i -> #X(F_{q^i})
        self.alpha = alpha(m)
        self.gamma2 = gamma2
        self.gamma2_constant = None if gamma2_constant is None else as_scalar(gamma2_constant)
        self.step_budget = step_budget
        self.rng = random.Random(seed) if seed is not None else None
        self.clear()

    def clear(self):
        self._br = {}
        self._no = {}
        self._active = set()
        self._no_active = set()
        self._c = {}
        self.steps = 0

    def c(self, k):
        if k not in self._c:
            i = self.m * k
            s = c_coeff(i, self.N(i))
            # sign fixed against exact r = n twists (ranks 2, 3; q = 2, 3, 4)
            if (self.m - 1) * k % 2:
                s = -s
            self._c[k] = s
        return self._c[k]

    def _tick(self):
        self.steps += 1
        if self.steps > self.step_budget:
            raise StepBudgetExceeded("normal ordering exceeded %d steps" % self.step_budget)

    # -- theta
    def theta(self, z):
        g = gamma(z)
        z0 = (z[0] // g, z[1] // g)
        out = {}
        for lam, w in theta_terms(g):
            word = tuple(sorted(((k * z0[0], k * z0[1]) for k in lam), key=vkey))
            out[word] = self.alpha ** len(lam) * RationalFunctionV.const(w)
        return out

    # -- normal ordering
    def normal_order_word(self, word):
        word = tuple(word)
        if len(word) <= 1:
            return {word: ONE}
        if is_normal(word):
            return {word: ONE}
        hit = self._no.get(word)
        if hit is not None:
            return hit
        if word in self._no_active:
            raise _Cycle(word)
        self._no_active.add(word)
        try:
            self._tick()
            res = self._normal_order(word)
        finally:
            self._no_active.discard(word)
        self._no[word] = res
        return res

    def _normal_order(self, word):
        # first descent
        for i in range(len(word) - 1):
            a, b = word[i], word[i + 1]
            if vkey(a) > vkey(b):
                break
        swapped = word[:i] + (b, a) + word[i + 2:]
        out = {}
        if det(a, b) == 0:
            # commuting letters: a plain swap
            return dict(self.normal_order_word(swapped))
        _add_into(out, self.normal_order_word(swapped))
        pre, post = word[:i], word[i + 2:]
        for w, c in self.bracket(a, b).items():
            _add_into(out, self.normal_order_word(pre + w + post), c)
        return out

    def normal_order(self, expr):
        out = {}
        for w, c in expr.items():
            _add_into(out, self.normal_order_word(w), c)
        return out

    def mul(self, e1, e2):
        out = {}
        for w1, c1 in e1.items():
            for w2, c2 in e2.items():
                _add_into(out, self.normal_order_word(w1 + w2), c1 * c2)
        return out

    # -- brackets
    def bracket_gen_expr(self, a, expr):
        """[t_a, expr] by Leibniz, normal ordered."""
        out = {}
        for w, c in expr.items():
            for i, b in enumerate(w):
                if det(a, b) == 0:
                    continue
                for u, s in self.bracket(a, b).items():
                    _add_into(out, self.normal_order_word(w[:i] + u + w[i + 1:]), c * s)
        return out

    def bracket_expr_gen(self, expr, b):
        return _scale(self.bracket_gen_expr(b, expr), -ONE)

    def bracket(self, x, y):
        """[t_x, t_y] as a normal ordered expression."""
        if det(x, y) == 0:
            return {}
        if vkey(x) < vkey(y):
            return _scale(self.bracket(y, x), -ONE)
        key = (x, y)
        hit = self._br.get(key)
        if hit is not None:
            return hit
        if key in self._active:
            raise _Cycle(key)
        self._active.add(key)
        try:
            self._tick()
            res = self._bracket(x, y)
        finally:
            self._active.discard(key)
        self._br[key] = res
        return res

    def _bracket(self, x, y):
        gx, gy = gamma(x), gamma(y)
        I = pick_interior_count(x, y)
        if I == 0 and (gx == 1 or gy == 1):
            k = gy if gx == 1 else gx
            eps = 1 if det(y, x) > 0 else -1
            s = self.c(k) / self.alpha
            if eps < 0:
                s = -s
            return _scale(self.theta((x[0] + y[0], x[1] + y[1])), s)
        if I == 0:
            # gamma(x) = gamma(y) = gamma(x + y) = 2
            if self.gamma2 == "strict":
                raise UnsupportedRelation(
                    "bracket of %r and %r needs the gamma=2 relation constant" % (x, y))
            if self.gamma2 == "config":
                return self._gamma2_config(x, y)
        splits = self.splits(x, y)
        if self.rng is not None:
            self.rng.shuffle(splits)
        last = None
        for sp in splits:
            try:
                return self._reduce(x, y, *sp)
            except _Cycle as e:
                last = e
        if last is not None:
            raise last
        raise UnsupportedRelation("no valid split for %r, %r" % (x, y))

    def _gamma2_config(self, x, y):
        if self.gamma2_constant is None:
            raise UnsupportedRelation("gamma=2 relation requested but no constant configured")
        h = ((x[0] // 2 + y[0] // 2), (x[1] // 2 + y[1] // 2))
        c1, c2 = self.c(1), self.c(2)
        out = {}
        _add_into(out, {(h, h): self.gamma2_constant})
        _add_into(out, {((2 * h[0], 2 * h[1]),): c2 * (c2 / c1 - RationalFunctionV.const(2))})
        return out

    def splits(self, x, y):
        """Candidate reductions (target, other, v, w) with target = v + w,
        v primitive, Delta_{v,w} empty, both strictly on the target's side of
        the other vector.  Targets: y first, then x; v in lexicographic order."""
        out = []
        for z, u in ((y, x), (x, y)):
            out.extend((z is y, v, w) for v, w in self._splits_of(z, u))
        return out

    def _splits_of(self, z, u):
        side = det(u, z)
        n, d = z
        if n == 0:
            return []
        res = []
        bound = abs(d) + n + 4
        for nv in range(0, n + 1):
            for dv in range(-bound - abs(d), bound + abs(d) + 1):
                v = (nv, dv)
                w = (n - nv, d - dv)
                if not in_cone(v) or not in_cone(w) or det(v, w) == 0:
                    continue
                if gamma(v) != 1:
                    continue
                a, b = det(u, v), det(u, w)
                if a == 0 or b == 0 or (a > 0) != (side > 0) or (b > 0) != (side > 0):
                    continue
                if pick_interior_count(v, w) != 0:
                    continue
                res.append((v, w))
        res.sort()
        return res

    def _reduce(self, x, y, target_is_y, v, w):
        alpha_ = self.alpha
        eps = 1 if det(v, w) > 0 else -1
        cw = self.c(gamma(w))
        pref = ONE / cw if eps > 0 else -ONE / cw
        out = {}
        if target_is_y:
            z = y
            # [[t_x, t_w], t_v] + [t_w, [t_x, t_v]]
            _add_into(out, self.bracket_expr_gen(self.bracket(x, w), v), pref)
            _add_into(out, self.bracket_gen_expr(w, self.bracket(x, v)), pref)
        else:
            z = x
            # [[t_w, t_v], t_y] = [t_w, [t_v, t_y]] - [t_v, [t_w, t_y]]
            _add_into(out, self.bracket_gen_expr(w, self.bracket(v, y)), pref)
            _add_into(out, self.bracket_gen_expr(v, self.bracket(w, y)), -pref)
        g = gamma(z)
        if g > 1:
            z0 = (z[0] // g, z[1] // g)
            for lam, wt in theta_terms(g):
                if len(lam) < 2:
                    continue
                word = tuple(sorted(((k * z0[0], k * z0[1]) for k in lam), key=vkey))
                s = alpha_ ** (len(lam) - 1) * RationalFunctionV.const(wt)
                if target_is_y:
                    part = self.bracket_gen_expr(x, {word: ONE})
                else:
                    part = self.bracket_expr_gen({word: ONE}, y)
                _add_into(out, part, -s)
        return out

    # -- adjoint action of verticals followed by projection to vector bundles
    def ad_vertical(self, ks, word):
        """pi^vec( ad_{t_(0,k1)} ... ad_{t_(0,kj)} (word) ), verticals applied
        right to left; words ending in a vertical letter are dropped."""
        expr = self.normal_order_word(tuple(word))
        for k in reversed(ks):
            expr = self.bracket_gen_expr((0, k), expr)
            expr = {w: c for w, c in expr.items() if not (w and w[-1][0] == 0)}
        return expr


def subdivide(v, w):
    """Shortest (then lexicographically smallest) chain v = z0, ..., zs = w
    with every Delta_{z(i-1), z(i)} free of interior lattice points.  Points
    are taken from the closed parallelogram spanned by v and w, ordered by
    angle from v towards w."""
    D = det(v, w)
    if D == 0:
        raise ValueError("collinear input")
    if pick_interior_count(v, w) == 0:
        return [v, w]
    sgn = 1 if D > 0 else -1
    pts = set()
    xs = [0, v[0], w[0], v[0] + w[0]]
    ys = [0, v[1], w[1], v[1] + w[1]]
    for X in range(min(xs), max(xs) + 1):
        for Y in range(min(ys), max(ys) + 1):
            p = (X, Y)
            a, b = det(v, p) * sgn, det(p, w) * sgn
            if a > 0 and b > 0:
                # inside the parallelogram: p = s v + t w with 0 <= s, t <= 1
                s = Fraction(det(p, w), D)
                t = Fraction(det(v, p), D)
                if 0 <= s <= 1 and 0 <= t <= 1:
                    pts.add(p)
    nodes = [v] + sorted(pts) + [w]
    # BFS for the shortest chain, lexicographic tie-break by exploring sorted
    from collections import deque
    best = {v: [v]}
    queue = deque([v])
    while queue:
        cur = queue.popleft()
        for p in nodes:
            if p in best or p == cur:
                continue
            if det(cur, p) * sgn <= 0:
                continue
            if pick_interior_count(cur, p) != 0:
                continue
            best[p] = best[cur] + [p]
            if p == w:
                return best[p]
            queue.append(p)
    raise AssertionError("no subdivision chain found")


def check_subdivision(chain):
    return all(pick_interior_count(a, b) == 0 for a, b in zip(chain, chain[1:]))


# -- dressed generators -------------------------------------------------------
class Generator:
    """T_v dressed by a character orbit (char basis) or a closed point."""

    __slots__ = ("v", "orbit", "point")

    def __init__(self, v, orbit=None, point=None):
        if (orbit is None) == (point is None):
            raise ValueError("give exactly one of orbit / point")
        if orbit is not None and gamma(v) % orbit.n != 0 and orbit.n != gamma(v):
            raise ValueError("orbit degree must equal gamma(v)")
        self.v, self.orbit, self.point = tuple(v), orbit, point

    def __eq__(self, other):
        return isinstance(other, Generator) and (self.v, self.orbit, self.point) == (
            other.v, other.orbit, other.point)

    def __hash__(self):
        return hash((self.v, self.orbit, self.point))

    def key(self):
        return vkey(self.v) + (str(self.orbit or self.point),)

    def __repr__(self):
        return "T%s^%s" % (self.v, self.orbit if self.orbit is not None else self.point)


class HallAlgebra:
    """Dressed expressions {tuple of Generators: scalar} in the character basis,
    computed tower by tower."""

    def __init__(self, table, **tower_opts):
        self.table = table
        self.curve = table.curve
        self.opts = tower_opts
        self._towers = {}

    def tower(self, m):
        if m not in self._towers:
            self._towers[m] = Tower(m, self.curve.symbolic_N, **self.opts)
        return self._towers[m]

    def tower_of(self, g):
        if g.orbit is None:
            raise NotAGeneratorOfAnyTower("point-basis generator has no tower")
        n = gamma(g.v)
        if g.orbit.n != n:
            raise NotAGeneratorOfAnyTower("orbit degree %d != gamma %d" % (g.orbit.n, n))
        try:
            sigma, m = self.table.primitive_source(g.orbit)
        except AssertionError as e:
            raise NotAGeneratorOfAnyTower(str(e))
        return sigma, m

    def to_tower(self, g):
        sigma, m = self.tower_of(g)
        return sigma, m, (g.v[0] // m, g.v[1] // m)

    def from_tower(self, sigma, m, w):
        V = (w[0] * m, w[1] * m)
        return Generator(V, orbit=self.table.norm_orbit(sigma, gamma(V)))

    def _word_out(self, sigma, m, word):
        return tuple(self.from_tower(sigma, m, w) for w in word)

    def bracket(self, g1, g2):
        s1, m1, w1 = self.to_tower(g1)
        s2, m2, w2 = self.to_tower(g2)
        if (s1, m1) != (s2, m2):
            return {}
        T = self.tower(m1)
        return {self._word_out(s1, m1, w): c for w, c in T.bracket(w1, w2).items()}

    def theta_expand(self, z, m=1):
        return self.tower(m).theta(z)

    def normal_order(self, expr):
        """Normal order a dressed expression; letters of different towers commute."""
        out = {}
        for word, c in expr.items():
            for w2, c2 in self._normal_order_word(word).items():
                _add_into(out, {w2: c2}, c)
        return out

    def _normal_order_word(self, word):
        groups = {}
        order = []
        for g in word:
            s, m, w = self.to_tower(g)
            if (s, m) not in groups:
                groups[(s, m)] = []
                order.append((s, m))
            groups[(s, m)].append(w)
        result = {(): ONE}
        for (s, m) in order:
            part = self.tower(m).normal_order_word(tuple(groups[(s, m)]))
            dressed = {self._word_out(s, m, w): c for w, c in part.items()}
            result = merge_commuting(result, dressed)
        return result


def merge_commuting(e1, e2):
    """Product of expressions whose letters pairwise commute, merged by slope."""
    out = {}
    for w1, c1 in e1.items():
        for w2, c2 in e2.items():
            w = tuple(sorted(w1 + w2, key=lambda g: g.key()))
            _add_into(out, {w: c1 * c2})
    return out
