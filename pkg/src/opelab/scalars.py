"""Exact arithmetic in Q and in the field Q(k) of rational functions in the level.

Every coefficient in the engine is either a plain rational (``QQ``) or a
``RationalFunction`` in one variable (by convention the level ``k``).  Rational
functions are kept in a canonical form -- monic denominator, gcd(num, den) = 1 --
so that equality is a structural comparison.

Polynomials are dense coefficient tuples indexed by degree, with no trailing
zeros; the zero polynomial is the empty tuple.
"""

from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq

    def QQ(a=0, b=1):
        return _mpq(a, b)
except ImportError:  # pragma: no cover - gmpy2 is an optional speedup
    def QQ(a=0, b=1):
        return Fraction(a, b)

_QQ0 = QQ(0)
_QQ1 = QQ(1)


class ScalarError(ValueError):
    pass


class ZeroDenominator(ScalarError):
    pass


class PoleAtLevel(ScalarError):
    pass


class NoConsistentFunction(ScalarError):
    pass


# ---------------------------------------------------------------------------
# dense polynomial helpers over QQ
# ---------------------------------------------------------------------------

def ptrim(c):
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return tuple(c)


def padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = out[i] + x
    return ptrim(out)


def pneg(a):
    return tuple(-x for x in a)


def psub(a, b):
    return padd(a, pneg(b))


def pmul(a, b):
    if not a or not b:
        return ()
    out = [_QQ0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return ptrim(out)


def pscale(a, s):
    if not s:
        return ()
    return tuple(x * s for x in a)


def pmonic(a):
    """Scale to leading coefficient 1; returns (monic, leading)."""
    if not a:
        return (), _QQ1
    lc = a[-1]
    if lc == 1:
        return a, _QQ1
    inv = _QQ1 / lc
    return tuple(x * inv for x in a), lc


def pdivmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [_QQ0] * max(0, len(a) - len(b) + 1)
    inv = _QQ1 / b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * inv
        if c:
            q[i] = c
            for j, y in enumerate(b):
                a[i + j] = a[i + j] - c * y
    return ptrim(q), ptrim(a)


def pgcd(a, b):
    """Monic gcd by the Euclidean algorithm (degrees here stay small)."""
    while b:
        a, b = b, pdivmod(a, b)[1]
    return pmonic(a)[0]


def peval(a, x):
    acc = _QQ0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def pderive(a):
    return ptrim([a[i] * i for i in range(1, len(a))])


def pstr(a, var="k"):
    if not a:
        return "0"
    parts = []
    for i, c in enumerate(a):
        if not c:
            continue
        if i == 0:
            parts.append(str(c))
        else:
            mono = var if i == 1 else "%s^%d" % (var, i)
            if c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append("%s*%s" % (c, mono))
    out = parts[0]
    for p in parts[1:]:
        out += ("+" + p) if not p.startswith("-") else p
    return out


def rational_roots(a):
    """All rational roots of a QQ-polynomial, with multiplicity, plus the
    nonlinear remainder factor (monic) once rational roots are deflated."""
    a = pmonic(a)[0]
    roots = []
    if not a:
        return roots, ()
    # strip roots at 0
    z = 0
    while len(a) > 1 and not a[0]:
        a = a[1:]
        z += 1
    roots.extend([_QQ0] * z)
    # clear denominators -> integer polynomial
    if len(a) > 1:
        den = 1
        for c in a:
            den = den * Fraction(c).denominator // _gcd(den, Fraction(c).denominator)
        ints = [int(Fraction(c) * den) for c in a]
        cand = set()
        a0, an = ints[0], ints[-1]
        for p in _divisors(abs(a0)):
            for q in _divisors(abs(an)):
                cand.add(QQ(p, q))
                cand.add(QQ(-p, q))
        for r in sorted(cand):
            while len(a) > 1 and peval(a, r) == 0:
                a = pdivmod(a, (-r, _QQ1))[0]
                roots.append(r)
    rem = a if len(a) > 1 else ()
    return roots, rem


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _divisors(n):
    if n == 0:
        return [1]
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class RationalFunction:
    """An element of Q(k) in canonical form.

    Invariants: the denominator is monic and coprime to the numerator; zero is
    represented as numerator () over denominator (1,).  Canonical form makes
    ``==`` and ``hash`` structural.
    """

    __slots__ = ("num", "den", "_hash")

    variable = "k"

    def __init__(self, num, den=(_QQ1,), _normalized=False):
        if not _normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # -- constructors -------------------------------------------------
    @staticmethod
    def from_int(n):
        return _from_const(QQ(n))

    @staticmethod
    def from_fraction(q):
        return _from_const(QQ(q))

    @staticmethod
    def var():
        return RationalFunction((_QQ0, _QQ1), (_QQ1,), _normalized=True)

    @staticmethod
    def from_roots(const, num_roots=(), den_roots=()):
        num = (QQ(const),)
        for r in num_roots:
            num = pmul(num, (-QQ(r), _QQ1))
        den = (_QQ1,)
        for r in den_roots:
            den = pmul(den, (-QQ(r), _QQ1))
        return RationalFunction(num, den)

    # -- structure -----------------------------------------------------
    def is_constant(self):
        return len(self.num) <= 1 and self.den == (_QQ1,)

    def constant_value(self):
        if not self.is_constant():
            raise ScalarError("not a constant: %s" % self)
        return self.num[0] if self.num else _QQ0

    def degree(self):
        """Degree as a rational function: deg num - deg den (zero -> None)."""
        if not self.num:
            return None
        return (len(self.num) - 1) - (len(self.den) - 1)

    def leading_ratio(self):
        if not self.num:
            return _QQ0
        return self.num[-1] / self.den[-1]

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(padd(self.num, other.num), self.den)
        return RationalFunction(
            padd(pmul(self.num, other.den), pmul(other.num, self.den)),
            pmul(self.den, other.den))

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        return _coerce(other).__sub__(self)

    def __neg__(self):
        return RationalFunction(pneg(self.num), self.den, _normalized=True)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.num or not other.num:
            return _RF_ZERO
        # cross-reduce before multiplying to keep degrees small
        n1, d2 = self.num, other.den
        n2, d1 = other.num, self.den
        if d2 != (_QQ1,):
            g = pgcd(n1, d2)
            if len(g) > 1:
                n1 = pdivmod(n1, g)[0]
                d2 = pdivmod(d2, g)[0]
        if d1 != (_QQ1,):
            g = pgcd(n2, d1)
            if len(g) > 1:
                n2 = pdivmod(n2, g)[0]
                d1 = pdivmod(d1, g)[0]
        den = pmul(d1, d2)
        den, lc = pmonic(den)
        num = pmul(n1, n2)
        if lc != 1:
            num = pscale(num, _QQ1 / lc)
        return RationalFunction(num, den, _normalized=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num:
            raise ZeroDenominator("division by zero rational function")
        return self.__mul__(RationalFunction(other.den, other.num))

    def __rtruediv__(self, other):
        return _coerce(other).__truediv__(self)

    def __pow__(self, e):
        if e < 0:
            return (_RF_ONE / self) ** (-e)
        out = _RF_ONE
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # -- comparisons -----------------------------------------------------
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __ne__(self, other):
        r = self.__eq__(other)
        return NotImplemented if r is NotImplemented else not r

    def __bool__(self):
        return bool(self.num)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- evaluation --------------------------------------------------------
    def specialize(self, k0):
        k0 = QQ(k0)
        d = peval(self.den, k0)
        if not d:
            raise PoleAtLevel("pole at %s = %s" % (self.variable, k0))
        return peval(self.num, k0) / d

    def derivative(self):
        return RationalFunction(
            psub(pmul(pderive(self.num), self.den), pmul(self.num, pderive(self.den))),
            pmul(self.den, self.den))

    def denominator_roots(self):
        return rational_roots(self.den)

    def __repr__(self):
        if self.den == (_QQ1,):
            return pstr(self.num)
        return "(%s)/(%s)" % (pstr(self.num), pstr(self.den))


def _normalize(num, den):
    num = ptrim(num)
    den = ptrim(den)
    if not den:
        raise ZeroDenominator("zero denominator")
    if not num:
        return (), (_QQ1,)
    g = pgcd(num, den)
    if len(g) > 1:
        num = pdivmod(num, g)[0]
        den = pdivmod(den, g)[0]
    den, lc = pmonic(den)
    if lc != 1:
        num = pscale(num, _QQ1 / lc)
    return num, den


def _from_const(q):
    if not q:
        return _RF_ZERO
    return RationalFunction((q,), (_QQ1,), _normalized=True)


def _coerce(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, int):
        return _from_const(QQ(x))
    if isinstance(x, (Fraction, type(_QQ0))):
        return _from_const(QQ(x))
    return NotImplemented


_RF_ZERO = RationalFunction((), (_QQ1,), _normalized=True)
_RF_ONE = RationalFunction((_QQ1,), (_QQ1,), _normalized=True)

K = RationalFunction.var()


def normalize(num, den):
    """Spec operation: canonical form of num/den given as coefficient lists."""
    return RationalFunction(tuple(QQ(c) for c in num), tuple(QQ(c) for c in den))


# ---------------------------------------------------------------------------
# coefficient rings: plain rationals vs rational functions
# ---------------------------------------------------------------------------

class RingQQ:
    """Plain rationals; the coefficient ring of specialized presentations."""

    name = "QQ"
    symbolic = False
    zero = _QQ0
    one = _QQ1

    @staticmethod
    def from_int(n):
        return QQ(n)

    @staticmethod
    def from_fraction(q):
        return QQ(q)

    @staticmethod
    def specialize(c, k0):
        return c


class RingRF:
    """Rational functions of the level; the generic coefficient ring."""

    name = "QQ(k)"
    symbolic = True
    zero = _RF_ZERO
    one = _RF_ONE
    k = K

    @staticmethod
    def from_int(n):
        return RationalFunction.from_int(n)

    @staticmethod
    def from_fraction(q):
        return RationalFunction.from_fraction(q)

    @staticmethod
    def specialize(c, k0):
        return c.specialize(k0)


RING_QQ = RingQQ()
RING_RF = RingRF()


# ---------------------------------------------------------------------------
# interpolation
# ---------------------------------------------------------------------------

def interpolate(samples, num_degree_bound, den_degree_bound):
    """Recover the unique rational function within the degree bounds through
    all (level, value) samples.

    The fit is a nullspace computation for p(x_i) - y_i q(x_i) = 0; the result
    is re-verified against every sample and returned in canonical form.
    Raises NoConsistentFunction if the data admits no such function.
    """
    samples = [(QQ(x), QQ(y)) for x, y in samples]
    xs = [x for x, _ in samples]
    if len(set(xs)) != len(xs):
        raise NoConsistentFunction("sample levels must be pairwise distinct")
    n_unknowns = num_degree_bound + den_degree_bound + 2
    if len(samples) < n_unknowns:
        raise NoConsistentFunction(
            "need at least %d samples for bounds (%d, %d), got %d"
            % (n_unknowns, num_degree_bound, den_degree_bound, len(samples)))
    rows = []
    for x, y in samples:
        row = []
        p = _QQ1
        for _ in range(num_degree_bound + 1):
            row.append(p)
            p = p * x
        p = _QQ1
        for _ in range(den_degree_bound + 1):
            row.append(-y * p)
            p = p * x
        rows.append(row)
    kernel = _kernel(rows, n_unknowns)
    for vec in kernel:
        num = ptrim(vec[: num_degree_bound + 1])
        den = ptrim(vec[num_degree_bound + 1:])
        if not den:
            continue
        if any(not peval(den, x) for x in xs):
            continue
        f = RationalFunction(num, den)
        if all(f.specialize(x) == y for x, y in samples):
            return f
    raise NoConsistentFunction(
        "no rational function of degree (%d, %d) fits the %d samples"
        % (num_degree_bound, den_degree_bound, len(samples)))


def _kernel(rows, width):
    """Kernel basis of a small dense QQ matrix given as row lists."""
    rows = [list(r) for r in rows]
    pivots = {}
    r = 0
    for c in range(width):
        pr = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = _QQ1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots[c] = r
        r += 1
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for fc in free:
        vec = [_QQ0] * width
        vec[fc] = _QQ1
        for c, pr in pivots.items():
            vec[c] = -rows[pr][fc]
        basis.append(vec)
    return basis
