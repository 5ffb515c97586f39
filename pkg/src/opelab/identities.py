"""Axiom checkers: skew symmetry, the commutator identity, and the two
weight-pairing identities used to pin down OPE data.

Each checker recomputes both sides through the engine and reports the
difference element; an empty difference is a pass.  Failures are reports,
never exceptions, so an inconsistent table can be diagnosed.
"""

import math
from fractions import Fraction


class IdentityReport:
    __slots__ = ("kind", "args", "modes", "diff")

    def __init__(self, kind, args, modes, diff):
        self.kind = kind
        self.args = args
        self.modes = modes
        self.diff = diff

    @property
    def passed(self):
        return not self.diff

    def __repr__(self):
        status = "pass" if self.passed else "FAIL diff=%r" % self.diff
        return "[%s %s modes=%s] %s" % (self.kind, self.args, self.modes,
                                        status)


def skew_image(a, b, n):
    """The skew-symmetry prediction for a_(n) b computed from b-side
    products:  (-1)^{|a||b|} sum_j (-1)^{n+j+1} d^j(b_(n+j) a) / j!."""
    p = a.pres
    koszul = -1 if (a.parity() and b.parity()) else 1
    w2 = (a.weight2() or 0) + (b.weight2() or 0)
    acc = p.zero()
    j = 0
    while w2 - 2 * (n + j + 1) >= 0:
        term = b.nth(n + j, a)
        if term:
            s = koszul * (1 if (n + j + 1) % 2 == 0 else -1)
            sc = p.ring.from_fraction(Fraction(s, math.factorial(j)))
            acc = acc + term.derive(j).scale(sc)
        j += 1
    return acc


def check_skew(p, a, b, n):
    """Report a_(n) b minus its skew-symmetry image."""
    a = p.gen(a) if not hasattr(a, "terms") else a
    b = p.gen(b) if not hasattr(b, "terms") else b
    diff = a.nth(n, b) - skew_image(a, b, n)
    return IdentityReport("skew", _names(p, a, b), (n,), diff)


def check_commutator(p, a, b, c, m, n):
    """The commutator (Borcherds) identity
    a_(m)(b_(n)c) - (-1)^{|a||b|} b_(n)(a_(m)c) = sum_j C(m,j) (a_(j)b)_(m+n-j)c.
    """
    a = p.gen(a) if not hasattr(a, "terms") else a
    b = p.gen(b) if not hasattr(b, "terms") else b
    c = p.gen(c) if not hasattr(c, "terms") else c
    koszul = -1 if (a.parity() and b.parity()) else 1
    lhs = a.nth(m, b.nth(n, c)) - b.nth(n, a.nth(m, c)).scale(
        p.ring.from_int(koszul))
    rhs = p.zero()
    w2ab = (a.weight2() or 0) + (b.weight2() or 0)
    for j in range(0, m + 1):
        if w2ab - 2 * (j + 1) < 0:
            break
        ab = a.nth(j, b)
        if ab:
            rhs = rhs + ab.nth(m + n - j, c).scale(
                p.ring.from_int(math.comb(m, j)))
    return IdentityReport("commutator", _names(p, a, b, c), (m, n), lhs - rhs)


def check_pairing1(p, u, v, w):
    """U_(1)(V_(1)W) = (U_(1)V)_(1)W + (-1)^{|U||V|} V_(1)(U_(1)W)
       + (U_(0)V)_(2)W."""
    u, v, w = (p.gen(x) if not hasattr(x, "terms") else x for x in (u, v, w))
    koszul = -1 if (u.parity() and v.parity()) else 1
    lhs = u.nth(1, v.nth(1, w))
    rhs = (u.nth(1, v).nth(1, w)
           + v.nth(1, u.nth(1, w)).scale(p.ring.from_int(koszul))
           + u.nth(0, v).nth(2, w))
    return IdentityReport("pairing1", _names(p, u, v, w), (1, 1), lhs - rhs)


def check_pairing2(p, u, v, w):
    """U_(3)(V_(0)W) = (U_(3)V)_(0)W + (-1)^{|U||V|} V_(0)(U_(3)W)
       + 3 (U_(2)V)_(1)W + 3 (U_(1)V)_(2)W + (U_(0)V)_(3)W."""
    u, v, w = (p.gen(x) if not hasattr(x, "terms") else x for x in (u, v, w))
    koszul = -1 if (u.parity() and v.parity()) else 1
    three = p.ring.from_int(3)
    lhs = u.nth(3, v.nth(0, w))
    rhs = (u.nth(3, v).nth(0, w)
           + v.nth(0, u.nth(3, w)).scale(p.ring.from_int(koszul))
           + u.nth(2, v).nth(1, w).scale(three)
           + u.nth(1, v).nth(2, w).scale(three)
           + u.nth(0, v).nth(3, w))
    return IdentityReport("pairing2", _names(p, u, v, w), (3, 0), lhs - rhs)


def verify_identity(p, kind, args, modes=None):
    """Dispatch into one identity check; returns an IdentityReport."""
    if kind == "skew":
        a, b = args
        n = modes[0] if modes else 0
        return check_skew(p, a, b, n)
    if kind == "commutator":
        a, b, c = args
        m, n = modes if modes else (0, 0)
        return check_commutator(p, a, b, c, m, n)
    if kind == "pairing1":
        return check_pairing1(p, *args)
    if kind == "pairing2":
        return check_pairing2(p, *args)
    raise ValueError("unknown identity kind %r" % kind)


def axiom_suite(p, max_mode=4, triples=True):
    """Run skew symmetry on all generator pairs (modes 0..max_mode) and the
    commutator identity on all generator triples (mode pairs in the same
    range).  Returns the list of failing reports (empty means pass)."""
    failures = []
    gens = [g.name for g in p.generators]
    for a in gens:
        for b in gens:
            for n in range(0, max_mode + 1):
                r = check_skew(p, a, b, n)
                if not r.passed:
                    failures.append(r)
    if triples:
        for a in gens:
            for b in gens:
                for c in gens:
                    for m in range(0, max_mode + 1):
                        for n in range(0, max_mode + 1):
                            r = check_commutator(p, a, b, c, m, n)
                            if not r.passed:
                                failures.append(r)
    return failures


def _names(p, *elements):
    out = []
    for e in elements:
        if len(e.terms) == 1:
            ((mono, c),) = e.terms.items()
            if len(mono) == 1 and mono[0][1] == 0 and c == p.ring.one:
                out.append(p.generators[mono[0][0]].name)
                continue
        out.append(repr(e))
    return tuple(out)
