"""Builders for the concrete vertex algebra presentations used here.

Free field and generalized free field algebras, universal affine vertex
algebras of a reductive Lie algebra, the two built-in minimal W-algebras
(for sp_4 and sl_4 at the minimal nilpotent), the coset Virasoro vectors,
and the large-level rescaling / limit machinery.

The built-in W-algebra tables resolve three misprints in their source data
(recorded in Presentation.notes and decided by the skew / commutator identity
checkers): the first-order pole of the G^- G^- OPE in sp_4 is -(4+2k) dY,
the weight-one H-field acts on G^+- with charges +1/-1, and in sl_4 the
field J commutes with the sl_2 triple while acting with charges +-2 on the
weight-3/2 fields.
"""

from fractions import Fraction

from .scalars import QQ, RING_QQ, RING_RF, RationalFunction, rational_roots
from .core import (Element, GeneratorSymbol, Presentation, VoaError,
                   WeightError, ope_singular)

K = RationalFunction.var()
ONE = RationalFunction.from_int(1)


def _rf(n, d=1):
    return RationalFunction.from_fraction(Fraction(n, d))


def _poly(*coeffs):
    """Polynomial in k from constant-first coefficients."""
    return RationalFunction(tuple(QQ(c) for c in coeffs))


# ---------------------------------------------------------------------------
# Lie algebra data and the affine builder
# ---------------------------------------------------------------------------

class LieAlgebraData:
    """Finite-dimensional Lie algebra data: basis labels, structure constants
    [a,b] = sum_c f_{ab}^c c, an invariant symmetric bilinear form, and the
    dual Coxeter number (metadata).  Antisymmetry, the Jacobi identity, and
    invariance of the form are checked at construction."""

    def __init__(self, labels, brackets, form, dual_coxeter=0):
        self.labels = list(labels)
        self.index = {l: i for i, l in enumerate(self.labels)}
        n = len(self.labels)
        self.bracket = {}
        for (a, b), rhs in brackets.items():
            ia, ib = self.index[a], self.index[b]
            self.bracket[(ia, ib)] = {self.index[c]: QQ(v)
                                      for c, v in rhs.items() if v}
        # close under antisymmetry
        for (ia, ib), rhs in list(self.bracket.items()):
            mirror = {c: -v for c, v in rhs.items()}
            if (ib, ia) in self.bracket:
                if self.bracket[(ib, ia)] != mirror:
                    raise VoaError("structure constants not antisymmetric")
            else:
                self.bracket[(ib, ia)] = mirror
        self.form = {}
        for (a, b), v in form.items():
            ia, ib = self.index[a], self.index[b]
            self.form[(ia, ib)] = QQ(v)
            self.form[(ib, ia)] = QQ(v)
        self.dual_coxeter = Fraction(dual_coxeter)
        self._check(n)

    def brk(self, ia, ib):
        return self.bracket.get((ia, ib), {})

    def frm(self, ia, ib):
        return self.form.get((ia, ib), QQ(0))

    def _check(self, n):
        for a in range(n):
            if self.brk(a, a):
                raise VoaError("[a,a] must vanish")
            for b in range(n):
                for c in range(n):
                    acc = {}
                    for (x, y, z) in ((a, b, c), (b, c, a), (c, a, b)):
                        for m, v in self.brk(x, y).items():
                            for r, w in self.brk(m, z).items():
                                acc[r] = acc.get(r, QQ(0)) + v * w
                    if any(acc.values()):
                        raise VoaError("Jacobi identity fails")
                # invariance ([a,b]|c) + (b|[a,c]) = 0
                for c in range(n):
                    s = QQ(0)
                    for m, v in self.brk(a, b).items():
                        s += v * self.frm(m, c)
                    for m, v in self.brk(a, c).items():
                        s += v * self.frm(b, m)
                    if s:
                        raise VoaError("bilinear form not invariant")


def sl2_data():
    """sl_2 with (theta, theta) = 2 normalization: (H|H)=2, (X|Y)=1."""
    return LieAlgebraData(
        ["H", "X", "Y"],
        {("H", "X"): {"X": 2}, ("H", "Y"): {"Y": -2}, ("X", "Y"): {"H": 1}},
        {("H", "H"): 2, ("X", "Y"): 1},
        dual_coxeter=2)


def abelian_data(n, form=None):
    labels = ["a%d" % (i + 1) for i in range(n)]
    if form is None:
        frm = {(l, l): 1 for l in labels}
    else:
        frm = {(labels[i], labels[j]): form[i][j]
               for i in range(n) for j in range(n) if form[i][j]}
    return LieAlgebraData(labels, {}, frm, dual_coxeter=0)


def build_affine(g, level, name=None, ring=None):
    """Universal affine vertex algebra of g at the given level.

    ``level`` may be a rational or a RationalFunction in k; the ring is
    inferred accordingly.
    """
    if ring is None:
        ring = RING_RF if isinstance(level, RationalFunction) else RING_QQ
    if not isinstance(level, RationalFunction):
        level = ring.from_fraction(Fraction(level))
    gens = [GeneratorSymbol(i, l, 2) for i, l in enumerate(g.labels)]
    p = Presentation(name or "V(%s)" % ",".join(g.labels), gens, ring=ring,
                     level_symbol="k" if ring is RING_RF else None)
    for i in range(len(gens)):
        for j in range(i, len(gens)):
            frm = g.frm(i, j)
            if frm:
                p.add_ope(i, j, 2, {(): level * ring.from_fraction(Fraction(frm))})
            brk = g.brk(i, j)
            if brk:
                p.add_ope(i, j, 1,
                          {((c, 0),): ring.from_fraction(Fraction(v))
                           for c, v in brk.items()})
    return p


# ---------------------------------------------------------------------------
# free field and generalized free field algebras
# ---------------------------------------------------------------------------

FREE_FIELD_KINDS = ("heisenberg", "symplectic_fermion", "bigT", "gen_even",
                    "gen_odd", "bc", "betagamma")


def build_free_field(kind, rank=1, ring=RING_QQ):
    """The free field algebras: Heisenberg H(n), symplectic fermions A(m),
    the weight-two generalized free field T, the generalized free field
    algebras G_ev(r) and G_odd(s), and the bc / beta-gamma systems."""
    if kind not in FREE_FIELD_KINDS:
        raise VoaError("unknown free field kind %r" % kind)
    if rank < 0:
        raise VoaError("rank must be >= 0")
    one = ring.one
    gens = []
    pairs = []  # (i, j, pole) -> vacuum
    if kind == "heisenberg":
        gens = [("alpha%d" % (i + 1), 2, 0) for i in range(rank)]
        pairs = [(i, i, 2) for i in range(rank)]
    elif kind == "symplectic_fermion":
        gens = [("e%d" % (i + 1), 2, 1) for i in range(rank)] + \
               [("f%d" % (i + 1), 2, 1) for i in range(rank)]
        pairs = [(i, rank + i, 2) for i in range(rank)]
    elif kind == "bigT":
        if rank not in (0, 1):
            raise VoaError("bigT has a single generator")
        gens = [("t", 4, 0)] * rank
        pairs = [(0, 0, 4)] if rank else []
    elif kind == "gen_even":
        gens = [("a%d" % (i + 1), 3, 0) for i in range(rank)] + \
               [("b%d" % (i + 1), 3, 0) for i in range(rank)]
        pairs = [(i, rank + i, 3) for i in range(rank)]
    elif kind == "gen_odd":
        gens = [("phi%d" % (i + 1), 3, 1) for i in range(rank)]
        pairs = [(i, i, 3) for i in range(rank)]
    elif kind == "bc":
        gens = [("b%d" % (i + 1), 1, 1) for i in range(rank)] + \
               [("c%d" % (i + 1), 1, 1) for i in range(rank)]
        pairs = [(i, rank + i, 1) for i in range(rank)]
    elif kind == "betagamma":
        gens = [("beta%d" % (i + 1), 1, 0) for i in range(rank)] + \
               [("gamma%d" % (i + 1), 1, 0) for i in range(rank)]
        pairs = [(i, rank + i, 1) for i in range(rank)]
    p = Presentation("%s(%d)" % (kind, rank),
                     [GeneratorSymbol(i, nm, w2, par)
                      for i, (nm, w2, par) in enumerate(gens)], ring=ring)
    for i, j, pole in pairs:
        p.add_ope(i, j, pole, {(): one})
    return p


# ---------------------------------------------------------------------------
# the two built-in minimal W-algebras
# ---------------------------------------------------------------------------

def _primary(p, T, names, weights2):
    """Add the OPEs of the conformal vector with primary generators."""
    for nm, w2 in zip(names, weights2):
        i = p.gen_index(nm)
        p.add_ope(T, nm, 2, {((i, 0),): _rf(w2, 2)})
        p.add_ope(T, nm, 1, {((i, 1),): ONE})


def build_minimal_w(which):
    """The minimal W-algebras of sp_4 and sl_4 over Q(k), with every OPE as
    in their explicit presentations and the affine subalgebra completed by
    the standard sl_2 normalization (level k+1/2 resp. k+1)."""
    if which == "sp4":
        return _build_sp4()
    if which == "sl4":
        return _build_sl4()
    raise VoaError("unknown minimal W-algebra %r" % which)


def _build_sp4():
    names = ["T", "H", "X", "Y", "Gp", "Gm"]
    w2s = [4, 2, 2, 2, 3, 3]
    gens = [GeneratorSymbol(i, n, w) for i, (n, w) in enumerate(zip(names, w2s))]
    notes = [
        "G^- G^- first-order pole is -(4+2k) dY (the printed Y has the wrong "
        "weight; forced by skew symmetry from the second-order pole).",
        "H acts on G^+/- with charges +1/-1 (the printed OPE shows the same "
        "sign for both; fixed by the commutator identity).",
    ]
    p = Presentation("W(sp4)", gens, ring=RING_RF, level_symbol="k",
                     notes=notes)
    T, H, X, Y, Gp, Gm = range(6)
    # Virasoro: c = -3(1+k)(1+2k)/(3+k)
    c = _poly(-3, -9, -6) / _poly(3, 1)
    p.add_ope("T", "T", 4, {(): c * _rf(1, 2)})
    p.add_ope("T", "T", 2, {((T, 0),): _rf(2)})
    p.add_ope("T", "T", 1, {((T, 1),): ONE})
    _primary(p, "T", ["H", "X", "Y"], [2, 2, 2])
    _primary(p, "T", ["Gp", "Gm"], [3, 3])
    # affine sl2 at level k + 1/2
    ell = _poly(Fraction(1, 2), 1)
    p.add_ope("H", "H", 2, {(): 2 * ell})
    p.add_ope("H", "X", 1, {((X, 0),): _rf(2)})
    p.add_ope("H", "Y", 1, {((Y, 0),): _rf(-2)})
    p.add_ope("X", "Y", 2, {(): ell})
    p.add_ope("X", "Y", 1, {((H, 0),): ONE})
    # action on the weight-3/2 fields
    p.add_ope("H", "Gp", 1, {((Gp, 0),): ONE})
    p.add_ope("H", "Gm", 1, {((Gm, 0),): -ONE})
    p.add_ope("X", "Gm", 1, {((Gp, 0),): ONE})
    p.add_ope("Y", "Gp", 1, {((Gm, 0),): ONE})
    # G G products
    p.add_ope("Gp", "Gp", 2, {((X, 0),): _poly(8, 4)})
    p.add_ope("Gp", "Gp", 1, {((X, 1),): _poly(4, 2)})
    p.add_ope("Gm", "Gm", 2, {((Y, 0),): _poly(-8, -4)})
    p.add_ope("Gm", "Gm", 1, {((Y, 1),): _poly(-4, -2)})
    p.add_ope("Gp", "Gm", 3, {(): _poly(-4, -10, -4)})
    p.add_ope("Gp", "Gm", 2, {((H, 0),): _poly(-4, -2)})
    p.add_ope("Gp", "Gm", 1, {
        ((T, 0),): _poly(6, 2),
        ((X, 0), (Y, 0)): _rf(-4),
        ((H, 0), (H, 0)): -ONE,
        ((H, 1),): -K,
    })
    return p


def _build_sl4():
    names = ["T", "J", "H", "X", "Y", "G1m", "G1p", "G2m", "G2p"]
    w2s = [4, 2, 2, 2, 2, 3, 3, 3, 3]
    gens = [GeneratorSymbol(i, n, w) for i, (n, w) in enumerate(zip(names, w2s))]
    notes = [
        "J commutes with the sl2 triple H, X, Y and acts on the weight-3/2 "
        "fields with charges +-2 (the displayed 'J X^+ ~ 2 X^+' refers to the "
        "charge +-2 multiplets, not to the sl2 raising field; forced by the "
        "commutator identity on the printed G OPEs).",
    ]
    p = Presentation("W(sl4)", gens, ring=RING_RF, level_symbol="k",
                     notes=notes)
    T, J, H, X, Y, G1m, G1p, G2m, G2p = range(9)
    # Virasoro: c = -3k(3+2k)/(4+k)
    c = _poly(0, -9, -6) / _poly(4, 1)
    p.add_ope("T", "T", 4, {(): c * _rf(1, 2)})
    p.add_ope("T", "T", 2, {((T, 0),): _rf(2)})
    p.add_ope("T", "T", 1, {((T, 1),): ONE})
    _primary(p, "T", ["J", "H", "X", "Y"], [2, 2, 2, 2])
    _primary(p, "T", ["G1m", "G1p", "G2m", "G2p"], [3, 3, 3, 3])
    # Heisenberg J and affine sl2 at level k + 1
    p.add_ope("J", "J", 2, {(): _poly(8, 4)})
    ell = _poly(1, 1)
    p.add_ope("H", "H", 2, {(): 2 * ell})
    p.add_ope("H", "X", 1, {((X, 0),): _rf(2)})
    p.add_ope("H", "Y", 1, {((Y, 0),): _rf(-2)})
    p.add_ope("X", "Y", 2, {(): ell})
    p.add_ope("X", "Y", 1, {((H, 0),): ONE})
    # J charges +-2 on the weight-3/2 fields
    p.add_ope("J", "G1m", 1, {((G1m, 0),): _rf(-2)})
    p.add_ope("J", "G1p", 1, {((G1p, 0),): _rf(2)})
    p.add_ope("J", "G2m", 1, {((G2m, 0),): _rf(-2)})
    p.add_ope("J", "G2p", 1, {((G2p, 0),): _rf(2)})
    # sl2 action: G^{1,*} carry H-charge +1, G^{2,*} charge -1
    p.add_ope("H", "G1m", 1, {((G1m, 0),): ONE})
    p.add_ope("H", "G1p", 1, {((G1p, 0),): ONE})
    p.add_ope("H", "G2m", 1, {((G2m, 0),): -ONE})
    p.add_ope("H", "G2p", 1, {((G2p, 0),): -ONE})
    p.add_ope("X", "G2p", 1, {((G1p, 0),): -ONE})
    p.add_ope("X", "G2m", 1, {((G1m, 0),): ONE})
    p.add_ope("Y", "G1p", 1, {((G2p, 0),): -ONE})
    p.add_ope("Y", "G1m", 1, {((G2m, 0),): ONE})
    # G G products (printed pairs are exactly the i <= j pairs here)
    p.add_ope("G1m", "G1p", 2, {((X, 0),): _poly(-4, -2)})
    p.add_ope("G1m", "G1p", 1, {((J, 0), (X, 0)): ONE, ((X, 1),): _poly(-2, -1)})
    p.add_ope("G2m", "G2p", 2, {((Y, 0),): _poly(-4, -2)})
    p.add_ope("G2m", "G2p", 1, {((J, 0), (Y, 0)): ONE, ((Y, 1),): _poly(-2, -1)})
    p.add_ope("G1m", "G2p", 3, {(): _poly(-4, -6, -2)})
    p.add_ope("G1m", "G2p", 2, {((J, 0),): _poly(1, 1), ((H, 0),): _poly(-2, -1)})
    p.add_ope("G1m", "G2p", 1, {
        ((T, 0),): _poly(4, 1),
        ((J, 0), (J, 0)): _rf(-3, 8),
        ((J, 0), (H, 0)): _rf(1, 2),
        ((H, 0), (H, 0)): _rf(-1, 2),
        ((X, 0), (Y, 0)): _rf(-2),
        ((J, 1),): _poly(Fraction(1, 2), Fraction(1, 2)),
        ((H, 1),): _poly(0, Fraction(-1, 2)),
    })
    p.add_ope("G1p", "G2m", 3, {(): _poly(4, 6, 2)})
    p.add_ope("G1p", "G2m", 2, {((J, 0),): _poly(1, 1), ((H, 0),): _poly(2, 1)})
    p.add_ope("G1p", "G2m", 1, {
        ((T, 0),): _poly(-4, -1),
        ((J, 0), (J, 0)): _rf(3, 8),
        ((J, 0), (H, 0)): _rf(1, 2),
        ((H, 0), (H, 0)): _rf(1, 2),
        ((X, 0), (Y, 0)): _rf(2),
        ((J, 1),): _poly(Fraction(1, 2), Fraction(1, 2)),
        ((H, 1),): _poly(0, Fraction(1, 2)),
    })
    return p


def affine_generator_names(which):
    """Names of the weight-one generators of the built-in W-algebras."""
    return {"sp4": ["H", "X", "Y"], "sl4": ["J", "H", "X", "Y"]}[which]


def coset_virasoro(which, presentation=None):
    """The coset Virasoro vector L = T - L_affine of the built-in W-algebras."""
    p = presentation if presentation is not None else build_minimal_w(which)
    if which == "sp4":
        T, H, X, Y = (p.gen_index(n) for n in ["T", "H", "X", "Y"])
        s = ONE / _poly(10, 4)
        return Element(p, {
            ((T, 0),): ONE,
            ((H, 0), (H, 0)): -s,
            ((X, 0), (Y, 0)): -4 * s,
            ((H, 1),): 2 * s,
        })
    if which == "sl4":
        T, J, H, X, Y = (p.gen_index(n) for n in ["T", "J", "H", "X", "Y"])
        return Element(p, {
            ((T, 0),): ONE,
            ((J, 0), (J, 0)): -ONE / _poly(16, 8),
            ((H, 0), (H, 0)): -ONE / _poly(12, 4),
            ((X, 0), (Y, 0)): -ONE / _poly(3, 1),
            ((H, 1),): ONE / _poly(6, 2),
        })
    raise VoaError("unknown minimal W-algebra %r" % which)


# ---------------------------------------------------------------------------
# large-level rescaling and limits
# ---------------------------------------------------------------------------

class DegreeOverflow(VoaError):
    pass


class RescalingData:
    """Per-generator rescaling exponents: generator g is rescaled by
    k^{-e_g}; the limit variable is kappa with k = kappa^2, so all exponents
    may be half-integers.  Exponents are stored doubled (integers)."""

    def __init__(self, exponents2):
        self.exponents2 = dict(exponents2)

    @staticmethod
    def for_minimal_w(p):
        """The standard rescaling: weight-one fields and T by k^{-1/2},
        weight-3/2 fields by k^{-1}."""
        e2 = {}
        for g in p.generators:
            e2[g.index] = 1 if g.weight2 in (2, 4) else 2
        return RescalingData(e2)

    @staticmethod
    def identity(p):
        return RescalingData({g.index: 0 for g in p.generators})


def large_k_limit(p, rescaling, name=None):
    """The kappa -> infinity limit of the rescaled presentation.

    Every rescaled structure constant must have degree <= 0 in kappa
    (kappa^2 = k); a positive degree raises DegreeOverflow naming the entry.
    The limit presentation has rational structure constants.
    """
    e2 = rescaling.exponents2
    q = Presentation(name or ("lim " + p.name), [
        GeneratorSymbol(g.index, g.name, g.weight2, g.parity)
        for g in p.generators
    ], ring=RING_QQ)
    for (i, j, pole), terms in p.ope_items():
        out = {}
        for mono, c in terms.items():
            if not isinstance(c, RationalFunction):
                c = RationalFunction.from_fraction(Fraction(c))
            delta2 = e2[i] + e2[j] - sum(e2[g] for g, _ in mono)
            cdeg = c.degree()
            if cdeg is None:
                continue
            kappa_deg = 2 * cdeg + 2 * delta2
            if kappa_deg > 0:
                raise DegreeOverflow(
                    "OPE entry (%s, %s) pole %d has kappa-degree %d > 0"
                    % (p.generators[i].name, p.generators[j].name, pole,
                       kappa_deg))
            if kappa_deg == 0:
                out[mono] = c.leading_ratio()
        if out:
            q.add_ope(i, j, pole, out)
    return q


def diagonalize_form(gram):
    """Congruence-diagonalize a symmetric matrix over Q.

    Returns (diag, basis) with basis[i] the coefficient rows of the new basis
    vectors: diag[i] = (v_i | v_i), off-diagonal pairings zero.
    """
    n = len(gram)
    g = [[QQ(gram[i][j]) for j in range(n)] for i in range(n)]
    basis = [[QQ(1) if i == j else QQ(0) for j in range(n)] for i in range(n)]
    for t in range(n):
        if not g[t][t]:
            swap = next((i for i in range(t + 1, n) if g[i][i]), None)
            if swap is not None:
                g[t], g[swap] = g[swap], g[t]
                for row in g:
                    row[t], row[swap] = row[swap], row[t]
                basis[t], basis[swap] = basis[swap], basis[t]
            else:
                pair = next((i for i in range(t + 1, n) if g[t][i]), None)
                if pair is None:
                    continue
                for j in range(n):
                    g[t][j] += g[pair][j]
                for row in g:
                    row[t] += row[pair]
                for j in range(n):
                    basis[t][j] += basis[pair][j]
        if not g[t][t]:
            continue
        for i in range(t + 1, n):
            if g[i][t]:
                f = g[i][t] / g[t][t]
                for j in range(n):
                    g[i][j] -= f * g[t][j]
                for row in g:
                    row[i] -= f * row[t]  # column op mirrors the row op
                for j in range(n):
                    basis[i][j] -= f * basis[t][j]
    return [g[i][i] for i in range(n)], basis


def identify_free_field_factors(p):
    """Recognize a limit presentation as a tensor product of free field
    factors, up to relabeling and diagonalization of the weight-one form.

    Returns a dict with the Heisenberg rank (weight-one sector with
    nondegenerate symmetric form), bigT data (weight-two generators with only
    a fourth-order central pole), the gen_even/gen_odd ranks from the
    weight-3/2 pairing, and a list of any residual cross couplings (empty for
    a genuine free-field limit).
    """
    by_w2 = {}
    for g in p.generators:
        by_w2.setdefault(g.weight2, []).append(g.index)
    residual = []
    zero = QQ(0)

    def vac(i, j, pole):
        a, b = min(i, j), max(i, j)
        terms = p.ope_entry(a, b, pole)
        if terms is None:
            return zero
        for mono in terms:
            if mono:
                residual.append((i, j, pole))
        c = terms.get((), zero)
        if (a, b) != (i, j):
            # central term of the mirror OPE by skew symmetry
            koszul = -1 if (p.generators[i].parity
                            and p.generators[j].parity) else 1
            c = c * koszul * (-1 if pole % 2 else 1)
        return c

    # cross-sector entries must vanish
    for (i, j, pole), terms in p.ope_items():
        wi = p.generators[i].weight2
        wj = p.generators[j].weight2
        if wi != wj and any(c for c in terms.values()):
            residual.append((i, j, pole))
    report = {"residual": residual}
    ones = by_w2.get(2, [])
    gram = [[vac(i, j, 2) for j in ones] for i in ones]
    diag, _ = diagonalize_form(gram)
    report["heisenberg_rank"] = sum(1 for d in diag if d)
    report["heisenberg_degenerate"] = sum(1 for d in diag if not d)
    twos = by_w2.get(4, [])
    report["bigT"] = [(p.generators[i].name, vac(i, i, 4)) for i in twos]
    halves = by_w2.get(3, [])
    even = [i for i in halves if not p.generators[i].parity]
    odd = [i for i in halves if p.generators[i].parity]
    pairing = [[vac(i, j, 3) for j in even] for i in even]
    report["gen_even_rank"] = Fraction(_rank_qq(pairing), 2)
    report["gen_odd_rank"] = _rank_qq([[vac(i, j, 3) for j in odd]
                                       for i in odd])
    return report


def _rank_qq(rows):
    m = [list(r) for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][c]
        m[rank] = [v * inv for v in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank
