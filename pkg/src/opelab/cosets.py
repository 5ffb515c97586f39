"""The coset laboratory: commutant weight-space solves, central charges,
primary tests, the bootstrap construction of the corrected commutant
generators, relation finding, singular-vector certificates at special
levels, and pole-set bookkeeping.

The default solve strategy is specialize-interpolate: weight-space nullspaces
are computed over Q at deterministic prime sample levels (101, 103, ...),
kernel bases are matched across samples by their echelon pivot pattern,
entries are interpolated back to Q(k), and the candidate basis is re-verified
symbolically.  Plain Q(k) elimination is available as strategy="symbolic".
"""

import math
from fractions import Fraction

from .scalars import (QQ, NoConsistentFunction, PoleAtLevel,
                      RationalFunction, interpolate)
from .core import Element, SingularPart, VoaError, ope_singular
from .linalg import kernel_of_columns, row_hash, rref_rows, solve_in_columns


class NongenericSample(VoaError):
    pass


class InterpolationFailure(VoaError):
    pass


class VanishingLeadingCoefficient(VoaError):
    pass


class NotVirasoro(VoaError):
    pass


class NotSingular(VoaError):
    def __init__(self, msg, generator=None, mode=None, image=None):
        super().__init__(msg)
        self.generator = generator
        self.mode = mode
        self.image = image


def _rf(*coeffs):
    """Polynomial in k from constant-first rational coefficients."""
    return RationalFunction(tuple(QQ(c) for c in coeffs))


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def sample_levels(start=101):
    """Deterministic generic sample levels: primes from ``start`` upward,
    far away from every pole appearing in the built-in data."""
    n = start
    while True:
        if _is_prime(n):
            yield QQ(n)
        n += 2


def table_degree(p):
    """Largest numerator/denominator degree among the table coefficients."""
    d = 0
    for _, terms in p.ope_items():
        for c in terms.values():
            if isinstance(c, RationalFunction):
                d = max(d, len(c.num) - 1, len(c.den) - 1)
    return d


# ---------------------------------------------------------------------------
# commutant weight spaces
# ---------------------------------------------------------------------------

class CommutantResult:
    def __init__(self, weight2, basis, strategy, sample_levels, events=()):
        self.weight2 = weight2
        self.basis = basis
        self.strategy = strategy
        self.sample_levels = list(sample_levels)
        self.events = list(events)

    @property
    def dimension(self):
        return len(self.basis)

    def __repr__(self):
        return "CommutantResult(weight=%s, dim=%d, strategy=%s)" % (
            Fraction(self.weight2, 2), self.dimension, self.strategy)


def _commutant_columns(p, subidx, basis_monos, w2):
    """Stacked mode-action columns: one column per basis monomial, rows keyed
    (subalgebra generator, mode, image monomial)."""
    cols = []
    for mono in basis_monos:
        x = Element(p, {mono: p.ring.one})
        col = {}
        for j in subidx:
            J = p.gen(j)
            for n in range(0, w2 // 2 + 2):
                img = J.nth(n, x)
                for m, c in img.terms.items():
                    col[(j, n, m)] = c
        cols.append(col)
    return cols


def commutant_basis(p, subgens, weight, strategy="specialize-interpolate",
                    min_samples=3, degree_cap=64, max_retries=12):
    """Basis of the weight space of Com(<subgens>, p).

    ``subgens`` must be weight-one generators closed under their own OPEs.
    The returned basis Elements are over p's ring; with the default strategy
    they are obtained by interpolation over prime sample levels and then
    re-verified symbolically.
    """
    w2 = int(2 * Fraction(weight))
    subidx = [p.gen_index(g) for g in subgens]
    for j in subidx:
        if p.generators[j].weight2 != 2:
            raise VoaError("commutant subalgebra generators must have weight 1")
    basis_monos = p.weight_basis(Fraction(w2, 2))
    if not basis_monos:
        return CommutantResult(w2, [], strategy, [])
    if strategy == "symbolic" or not p.ring.symbolic:
        cols = _commutant_columns(p, subidx, basis_monos, w2)
        kern = kernel_of_columns(cols, p.ring.one)
        rows = [[vec.get(i, p.ring.zero) for i in range(len(basis_monos))]
                for vec in kern]
        rows, _ = rref_rows(rows, len(basis_monos), p.ring.one)
        basis = [Element(p, {m: c for m, c in zip(basis_monos, row) if c})
                 for row in rows]
        return CommutantResult(w2, basis, "symbolic", [])

    # specialize-interpolate
    events = []
    gen = sample_levels()
    levels = []
    kernels = {}

    def kernel_at(k0):
        q = p.specialize(k0)
        cols = _commutant_columns(q, subidx, basis_monos, w2)
        kern = kernel_of_columns(cols, QQ(1))
        rows = [[vec.get(i, QQ(0)) for i in range(len(basis_monos))]
                for vec in kern]
        rows, piv = rref_rows(rows, len(basis_monos), QQ(1))
        return tuple(piv), rows

    def add_level():
        for _ in range(max_retries):
            k0 = next(gen)
            if k0 in levels:
                continue
            try:
                pat, rows = kernel_at(k0)
            except PoleAtLevel:
                events.append("skipped level %s (pole in table)" % k0)
                continue
            levels.append(k0)
            kernels[k0] = (pat, rows)
            return k0
        raise NongenericSample("could not find a usable sample level")

    for _ in range(min_samples):
        add_level()
    # agree on the echelon pivot pattern; resample outliers
    for _ in range(max_retries):
        pats = {}
        for k0 in levels:
            pats.setdefault(kernels[k0][0], []).append(k0)
        if len(pats) == 1:
            break
        best = max(pats.values(), key=len)
        for k0 in list(levels):
            if k0 not in best:
                events.append("nongeneric sample at k=%s (pivot pattern "
                              "mismatch), resampled" % k0)
                levels.remove(k0)
                del kernels[k0]
        while len(levels) < min_samples:
            add_level()
    else:
        raise NongenericSample("sample kernels never agreed: %s" % events)
    pattern = kernels[levels[0]][0]
    dim = len(pattern)
    if dim == 0:
        return CommutantResult(w2, [], strategy, levels, events)

    # interpolate each kernel entry, growing degree bounds as needed
    bound = table_degree(p) + 4
    while True:
        need = 2 * bound + 2
        while len(levels) < need:
            k0 = add_level()
            if kernels[k0][0] != pattern:
                raise NongenericSample(
                    "pivot pattern changed at extension level %s" % k0)
        try:
            basis = []
            for r in range(dim):
                terms = {}
                for cidx in range(len(basis_monos)):
                    pts = [(k0, kernels[k0][1][r][cidx]) for k0 in levels]
                    if all(not v for _, v in pts):
                        continue
                    f = interpolate(pts, bound, bound)
                    if f:
                        terms[basis_monos[cidx]] = f
                basis.append(Element(p, terms))
            break
        except NoConsistentFunction:
            if bound * 2 > degree_cap:
                raise InterpolationFailure(
                    "no rational function of degree <= %d fits the kernel "
                    "entries" % degree_cap)
            bound *= 2
    # symbolic recheck: every basis vector is annihilated exactly
    for v in basis:
        ok, witness = is_in_commutant(p, subgens, v)
        if not ok:
            raise InterpolationFailure(
                "interpolated commutant vector fails symbolic recheck: %r"
                % (witness,))
    return CommutantResult(w2, basis, strategy, levels, events)


def is_in_commutant(p, subgens, x):
    """True iff J_(n) x = 0 for all listed weight-one generators J and all
    0 <= n <= weight(x) + 1; on failure also returns the first nonzero mode
    image as a witness (generator name, mode, image)."""
    if not x.is_homogeneous():
        raise VoaError("commutant membership needs a homogeneous element")
    w2 = x.weight2() or 0
    for g in subgens:
        J = p.gen(g)
        for n in range(0, w2 // 2 + 2):
            img = J.nth(n, x)
            if img:
                return False, (p.generators[p.gen_index(g)].name, n, img)
    return True, None


# ---------------------------------------------------------------------------
# Virasoro structure
# ---------------------------------------------------------------------------

def central_charge(p, L):
    """Twice the vacuum coefficient of L_(3) L, after asserting that the
    full OPE of L with itself has exact Virasoro shape."""
    if L.weight2() != 4 or L.parity() != 0:
        raise NotVirasoro("central_charge requires an even weight-2 element")
    sp = ope_singular(L, L)
    for pole, entry in sp.items():
        if pole == 4:
            if set(entry.terms) != {()}:
                raise NotVirasoro("pole 4 of L L is not central: %r" % entry)
        elif pole == 2:
            if entry != L.scale(p.ring.from_int(2)):
                raise NotVirasoro("pole 2 of L L is not 2L: %r" % entry)
        elif pole == 1:
            if entry != L.derive():
                raise NotVirasoro("pole 1 of L L is not dL: %r" % entry)
        else:
            raise NotVirasoro("unexpected pole %d in L L: %r" % (pole, entry))
    c4 = sp[4]
    cc = c4.coeff(()) if c4 is not None else p.ring.zero
    return 2 * cc


class PrimaryReport:
    def __init__(self, weight2, eigen_ok, higher):
        self.weight2 = weight2
        self.eigen_ok = eigen_ok
        self.higher = higher  # {pole (>= 3): Element}

    @property
    def is_primary(self):
        return self.eigen_ok and not self.higher

    def __repr__(self):
        if self.is_primary:
            return "primary, weight %s" % Fraction(self.weight2, 2)
        return "not primary (eigen_ok=%s, higher poles %s)" % (
            self.eigen_ok, sorted(self.higher))


def primary_test(p, L, x):
    """Check L_(1) x = wt(x) x and report every nonzero L_(n) x for n >= 2."""
    if x.weight2() is None:
        raise VoaError("primary_test needs a homogeneous element")
    w2 = x.weight2()
    eig = L.nth(1, x) - x.scale(p.ring.from_fraction(Fraction(w2, 2)))
    higher = {}
    for n in range(2, (4 + w2) // 2 + 1):
        img = L.nth(n, x)
        if img:
            higher[n + 1] = img
    return PrimaryReport(w2, not eig, higher)


# ---------------------------------------------------------------------------
# the u_{0,n} fields and the printed seed corrections
# ---------------------------------------------------------------------------

def u0n(p, which, n):
    """The uncorrected weight-(n+3) quadratic in the weight-3/2 fields."""
    one = p.ring.one
    if which == "sp4":
        Gp, Gm = p.gen_index("Gp"), p.gen_index("Gm")
        return Element(p, {((Gp, 0), (Gm, n)): one, ((Gp, n), (Gm, 0)): -one})
    if which == "sl4":
        G1m, G1p = p.gen_index("G1m"), p.gen_index("G1p")
        G2m, G2p = p.gen_index("G2m"), p.gen_index("G2p")
        return Element(p, {((G1m, 0), (G2p, n)): one, ((G1p, n), (G2m, 0)): one})
    raise VoaError("unknown family %r" % which)


def bootstrap_seed(which, p):
    """The printed corrected generator that seeds the bootstrap:
    U_{0,1} for sp_4 (weight 4) and U_{0,0} for sl_4 (weight 3)."""
    if which == "sp4":
        T, H, X, Y, Gp, Gm = (p.gen_index(n)
                              for n in ["T", "H", "X", "Y", "Gp", "Gm"])
        d = _rf(9, 2)
        return Element(p, {
            ((Gp, 0), (Gm, 1)): _rf(1),
            ((Gp, 1), (Gm, 0)): _rf(-1),
            ((T, 2),): _rf(2) * _rf(2, 1) * _rf(3, 1) / d,
            ((H, 3),): _rf(13, 8, 1) / (_rf(3) * d),
            ((H, 2), (H, 0)): _rf(-2) / d,
            ((H, 1), (H, 1)): -_rf(2, 1) / (_rf(2) * d),
            ((X, 1), (Y, 1)): _rf(-2) * _rf(2, 1) / d,
            ((T, 0), (H, 0), (H, 0)): _rf(2) / d,
            ((T, 0), (X, 0), (Y, 0)): _rf(8) / d,
            ((T, 0), (H, 1)): _rf(-4) / d,
            ((H, 0), (X, 1), (Y, 0)): _rf(4) / d,
            ((H, 0), (X, 0), (Y, 1)): _rf(4) / d,
            ((T, 0), (T, 0)): _rf(-2) * _rf(8, 3) / d,
            ((H, 1), (H, 0), (H, 0)): _rf(2) / d,
            ((T, 1), (H, 0)): _rf(-2) * _rf(3, 1) / d,
            ((H, 0), (Gp, 0), (Gm, 0)): _rf(2) / d,
            ((X, 0), (Gm, 0), (Gm, 0)): _rf(2) / d,
            ((Y, 0), (Gp, 0), (Gp, 0)): _rf(-2) / d,
        })
    if which == "sl4":
        T, J, H, X, Y = (p.gen_index(n) for n in ["T", "J", "H", "X", "Y"])
        G1m, G1p = p.gen_index("G1m"), p.gen_index("G1p")
        G2m, G2p = p.gen_index("G2m"), p.gen_index("G2p")
        two_k = _rf(2, 1)
        return Element(p, {
            ((G1m, 0), (G2p, 0)): _rf(1),
            ((G1p, 0), (G2m, 0)): _rf(1),
            ((J, 0), (J, 0), (J, 0)): -_rf(14, 5) / (_rf(24) * two_k * two_k),
            ((J, 0), (H, 0), (H, 0)): -_rf(1) / (_rf(2) * two_k),
            ((J, 0), (X, 0), (Y, 0)): -_rf(2) / two_k,
            ((J, 1), (H, 0)): _rf(Fraction(-1, 2)),
            ((J, 0), (H, 1)): -_rf(0, 1) / (_rf(2) * two_k),
            ((T, 0), (J, 0)): _rf(4, 1) / two_k,
            ((J, 2),): -_rf(16, 9, 2) / (_rf(6) * two_k),
        })
    raise VoaError("unknown family %r" % which)


def _family_data(which, p):
    if which == "sp4":
        gp, gm = p.gen_index("Gp"), p.gen_index("Gm")
        return {
            "pairs": [(gp, gm)],
            "T": p.gen_index("T"),
            "affine": [p.gen_index(n) for n in ["H", "X", "Y"]],
            "seed_n": 1,
            "step": 2,
            "u_valid": lambda m: m >= 1 and m % 2 == 1,
        }
    if which == "sl4":
        return {
            "pairs": [(p.gen_index("G1m"), p.gen_index("G2p")),
                      (p.gen_index("G1p"), p.gen_index("G2m"))],
            "T": p.gen_index("T"),
            "affine": [p.gen_index(n) for n in ["J", "H", "X", "Y"]],
            "seed_n": 0,
            "step": 1,
            "u_valid": lambda m: m >= 0,
        }
    raise VoaError("unknown family %r" % which)


def _g_sector_split(p, which, x, n_top):
    """Split off the pure weight-3/2-pair sector of x and express it in the
    basis {d^a u_{0,m}}; returns (f, rest_terms) with f the u_{0,n_top}
    coefficient.  Raises if the sector is not in the span (which would mean
    the product left the family's normal shape)."""
    fam = _family_data(which, p)
    pair_sets = [frozenset(pr) for pr in fam["pairs"]]
    sector = {}
    rest = {}
    for mono, c in x.terms.items():
        gset = frozenset(g for g, _ in mono)
        if len(mono) == 2 and gset in pair_sets:
            sector[mono] = c
        else:
            rest[mono] = c
    cands = []
    labels = []
    for m in range(n_top, -1, -1):
        if not fam["u_valid"](m):
            continue
        a = n_top - m
        vec = u0n(p, which, m).derive(a) if a else u0n(p, which, m)
        sc = p.ring.from_fraction(Fraction(1, math.factorial(a)))
        cands.append({mm: sc * cc for mm, cc in vec.terms.items()})
        labels.append((m, a))
    sol, _ = solve_in_columns(cands, sector, p.ring.one)
    if sol is None:
        raise VoaError("weight-3/2 pair sector is not spanned by the "
                       "u-family derivatives")
    f = p.ring.zero
    for idx, coeff in sol.items():
        m, a = labels[idx]
        if m == n_top:
            f = coeff
    return f, rest


def _obstruction_monomials(p, which, w2):
    """Monomials made of T factors (any derivative orders) and one charge
    conjugate weight-3/2 pair; these must be eliminated from the corrected
    generators."""
    fam = _family_data(which, p)
    T = fam["T"]
    out = []
    for mono in p.weight_basis(Fraction(w2, 2)):
        gs = [g for g, _ in mono]
        n_t = sum(1 for g in gs if g == T)
        others = [g for g in gs if g != T]
        if n_t >= 1 and len(others) == 2 and \
                frozenset(others) in [frozenset(pr) for pr in fam["pairs"]]:
            out.append(mono)
    return out


class BootstrapStep:
    def __init__(self, n, name, f, corrections, element):
        self.n = n
        self.name = name
        self.f = f
        self.corrections = corrections  # {readable monomial: coefficient}
        self.element = element

    def __repr__(self):
        return "BootstrapStep(%s, f=%r, corrections=%s)" % (
            self.name, self.f, sorted(self.corrections))


class BootstrapResult:
    def __init__(self, which, L, steps, elements):
        self.which = which
        self.L = L
        self.steps = steps
        self.elements = elements  # {n: Element}, includes the seed

    def __getitem__(self, n):
        return self.elements[n]


def bootstrap_corrections(which, n_max, presentation=None, level=None,
                          seed_element=None, L=None, verify=True):
    """Construct the corrected commutant generators U_{0,n} iteratively.

    Each step applies the seed's first mode, extracts the leading coefficient
    f against the u-family (error if it vanishes), removes the obstruction
    monomials (T-prefixed weight-3/2 pairs) by subtracting the unique
    combination of normally ordered L / U composites, and re-verifies the
    output in the commutant.
    """
    from .algebras import build_minimal_w, coset_virasoro

    p = presentation
    if p is None:
        p_sym = build_minimal_w(which)
        p = p_sym.specialize(level) if level is not None else p_sym
    else:
        p_sym = p
    if L is None:
        L = coset_virasoro(which, p_sym)
        if level is not None:
            L = L.specialize(level, p)
    fam = _family_data(which, p)
    n0 = fam["seed_n"]
    step = fam["step"]
    seed = seed_element
    if seed is None:
        seed = bootstrap_seed(which, p_sym)
        if level is not None:
            seed = seed.specialize(level, p)
    affine_names = [p.generators[i].name for i in fam["affine"]]
    elements = {n0: seed}
    steps = []
    named = [("L", L), ("U%d" % n0, seed)]
    n = n0
    while n + step <= n_max:
        target = n + step
        V = seed.nth(1, elements[n])
        f, _ = _g_sector_split(p, which, V, target)
        if not f:
            raise VanishingLeadingCoefficient(
                "f vanishes at step %d (level in the degenerate set)" % target)
        finv = p.ring.one / f
        tilde = V.scale(finv)
        w2 = tilde.weight2()
        obstructions = _obstruction_monomials(p, which, w2)
        space = CompositeSpace(p, named)
        comps = [m for m in space.monomials(w2)
                 if any(space.names[g] == "L" for g, _ in m)
                 and any(space.names[g] != "L" for g, _ in m)]
        cols = []
        for cm in comps:
            ev = space.evaluate(cm)
            cols.append({o: ev.terms[o] for o in obstructions if o in ev.terms})
        tgt = {o: tilde.terms[o] for o in obstructions if o in tilde.terms}
        sol, independent = solve_in_columns(cols, tgt, p.ring.one)
        if sol is None:
            raise VoaError("obstruction elimination is inconsistent at "
                           "step %d" % target)
        if not independent:
            raise VoaError("correction composites are dependent at step %d"
                           % target)
        corrections = {}
        U = tilde
        for idx, coeff in sol.items():
            U = U - space.evaluate(comps[idx]).scale(coeff)
            corrections[space.mono_str(comps[idx])] = coeff
        # the result must again have no obstruction monomials at all
        for o in obstructions:
            if o in U.terms:
                raise VoaError("obstruction monomial survives: %r" % (o,))
        if verify:
            ok, witness = is_in_commutant(p, affine_names, U)
            if not ok:
                raise VoaError("bootstrap output left the commutant: %r"
                               % (witness,))
        name = "U%d" % target
        elements[target] = U
        named.append((name, U))
        steps.append(BootstrapStep(target, name, f, corrections, U))
        n = target
    return BootstrapResult(which, L, steps, elements)


# ---------------------------------------------------------------------------
# normally ordered composites in named generators, and relation finding
# ---------------------------------------------------------------------------

class CompositeSpace:
    """Normally ordered monomials in a list of named homogeneous elements
    (with derivatives), together with their evaluation in the ambient
    presentation.  Evaluation caches suffixes, so families of monomials
    sharing tails are cheap."""

    def __init__(self, p, named):
        self.p = p
        self.names = [nm for nm, _ in named]
        self.elements = [el for _, el in named]
        self.weights2 = []
        self.parities = []
        for nm, el in named:
            w2 = el.weight2()
            if w2 is None:
                raise VoaError("named generator %s is not homogeneous" % nm)
            self.weights2.append(w2)
            self.parities.append(el.parity())
        self._suffix = {(): p.vacuum()}
        self._derived = {}

    def monomials(self, w2):
        out = []
        acc = []
        n = len(self.names)

        def rec(min_g, dcap, remaining):
            if remaining == 0:
                out.append(tuple(acc))
                return
            for g in range(min_g, n):
                w2g = self.weights2[g]
                if w2g > remaining:
                    continue
                dhigh = (remaining - w2g) // 2
                if g == min_g and dcap is not None:
                    dhigh = min(dhigh, dcap)
                for d in range(dhigh, -1, -1):
                    acc.append((g, d))
                    rec(g, d - 1 if self.parities[g] else d,
                        remaining - w2g - 2 * d)
                    acc.pop()

        rec(0, None, w2)
        return out

    def factor(self, g, d):
        key = (g, d)
        hit = self._derived.get(key)
        if hit is None:
            hit = self.elements[g].derive(d) if d else self.elements[g]
            self._derived[key] = hit
        return hit

    def evaluate(self, mono):
        hit = self._suffix.get(mono)
        if hit is None:
            g, d = mono[0]
            tail = self.evaluate(mono[1:]) if len(mono) > 1 else None
            head = self.factor(g, d)
            hit = head.wick(tail) if tail is not None else head
            self._suffix[mono] = hit
        return hit

    def mono_str(self, mono):
        parts = []
        for g, d in mono:
            nm = self.names[g]
            parts.append("d^%d(%s)" % (d, nm) if d else nm)
        if not parts:
            return "1"
        if len(parts) == 1:
            return parts[0]
        return ":" + " ".join(parts) + ":"


class RelationCertificate:
    """An exact normally ordered relation among named generators: the stored
    combination evaluates to zero (or to the stored target) in the ambient
    presentation, and verify() reconfirms that by independent recomputation.
    """

    def __init__(self, p, named, weight2, combination, target=None):
        self.p = p
        self.named = list(named)
        self.weight2 = weight2
        self.combination = combination  # {composite monomial: coefficient}
        self.target = target

    def coefficient(self, mono):
        return self.combination.get(tuple(mono), self.p.ring.zero)

    def coefficient_ratio(self, mono_a, mono_b):
        return self.coefficient(mono_a) / self.coefficient(mono_b)

    def pretty(self):
        space = CompositeSpace(self.p, self.named)
        return " + ".join("(%s)*%s" % (c, space.mono_str(m))
                          for m, c in sorted(self.combination.items()))

    def verify(self):
        """Recompute the combination through a fresh evaluation context."""
        space = CompositeSpace(self.p, self.named)
        acc = self.p.zero()
        for mono, c in self.combination.items():
            acc = acc + space.evaluate(mono).scale(c)
        if self.target is not None:
            acc = acc - self.target
        return not acc

    def __repr__(self):
        return "RelationCertificate(weight=%s, %d terms)" % (
            Fraction(self.weight2, 2), len(self.combination))


def find_relation(p, named, weight, target=None, sampler_seed=1,
                  projection_rows=420):
    """Enumerate normally ordered monomials of the given weight in the named
    generators, evaluate them, and solve for a linear dependency (or for an
    expression of ``target``).

    Returns a list of RelationCertificate (dependencies; empty list if the
    monomials are independent), or for ``target`` a single certificate /
    None.  Large weight spaces are first projected onto a deterministic
    pseudo-random row sample; candidates are always re-verified in full.
    """
    w2 = int(2 * Fraction(weight))
    space = CompositeSpace(p, named)
    monos = space.monomials(w2)
    if not monos:
        return None if target is not None else []
    ambient_dim = len(p.weight_basis(Fraction(w2, 2)))
    evaluated = [space.evaluate(m) for m in monos]
    use_projection = ambient_dim > 4 * projection_rows
    attempts = 3
    for attempt in range(attempts):
        if use_projection:
            support = set()
            for ev in evaluated:
                support.update(ev.terms)
            keep = min(len(support), projection_rows * (attempt + 1))
            seed = sampler_seed + attempt
            ordered = sorted(support, key=lambda m: (row_hash(m, seed), m))
            selected = set(ordered[:keep])
            cols = [{m: c for m, c in ev.terms.items() if m in selected}
                    for ev in evaluated]
        else:
            cols = [ev.terms for ev in evaluated]
        if target is not None:
            tgt = target.terms
            if use_projection:
                tgt = {m: c for m, c in tgt.items() if m in selected}
            sol, _ = solve_in_columns(cols, tgt, p.ring.one)
            if sol is None:
                return None
            cert = RelationCertificate(
                p, named, w2, {monos[i]: c for i, c in sol.items()},
                target=target)
            if cert.verify():
                return cert
            if not use_projection:
                return None
            continue
        kern = kernel_of_columns(cols, p.ring.one)
        certs = []
        ok = True
        for vec in kern:
            acc = p.zero()
            for i, c in vec.items():
                acc = acc + evaluated[i].scale(c)
            if acc:
                ok = False
                break
            certs.append(RelationCertificate(
                p, named, w2, {monos[i]: c for i, c in vec.items()}))
        if ok:
            return certs
        if not use_projection:
            raise VoaError("kernel verification failed without projection")
    raise VoaError("projected kernel kept spurious vectors after %d attempts"
                   % attempts)


# ---------------------------------------------------------------------------
# singular vectors
# ---------------------------------------------------------------------------

class SingularCertificate:
    def __init__(self, presentation, level, element, annihilation,
                 zero_mode_invariance, weight_eigenvalue):
        self.presentation = presentation
        self.level = level
        self.element = element
        self.annihilation = annihilation  # {(gen name, n): True}
        self.zero_mode_invariance = zero_mode_invariance  # {gen name: True}
        self.weight_eigenvalue = weight_eigenvalue

    def __repr__(self):
        return ("SingularCertificate(level=%s, weight=%s, %d modes verified)"
                % (self.level, self.element.weight(), len(self.annihilation)))


def singular_vector_check(p, x, k0=None, generators=None, affine=None):
    """Certify that x is annihilated by every positive (physical) mode of
    every strong generator, plus invariance under the affine zero modes.

    ``generators`` lists the strong generators of the (sub)algebra in which
    x is claimed to generate a proper graded ideal, as (name, Element) pairs;
    it defaults to the generators of p itself.  An ideal of a coset is
    certified against the coset's own strong generators (e.g. L and the
    corrected weight-4 field), not the ambient ones.

    For a generator of weight w the positive physical modes are a_(n) with
    n > w - 1: n >= 2 for a Virasoro vector (whose n = 1 mode is the weight
    operator, recorded as an eigenvalue check), n >= 1 for weights 1 and 3/2.
    ``affine`` names ambient weight-one generators whose zero modes must also
    annihilate x.  Raises NotSingular at the first failing mode.
    """
    if k0 is not None and p.ring.symbolic:
        q = p.specialize(k0)
        x = x.specialize(k0, q)
        if generators is not None:
            generators = [(nm, el.specialize(k0, q)) for nm, el in generators]
        p = q
    if not x:
        raise NotSingular("the vector vanishes at this level")
    if not x.is_homogeneous():
        raise VoaError("singular vector must be homogeneous")
    if generators is None:
        generators = [(g.name, p.gen(g.index)) for g in p.generators]
    if affine is None:
        affine = [g.name for g in p.generators if g.weight2 == 2]
    w2x = x.weight2()
    annihilation = {}
    zero_modes = {}
    weight_eig = None
    for name, el in generators:
        w2g = el.weight2()
        n_min = w2g // 2
        n_max = (w2g + w2x) // 2
        for n in range(n_min, n_max + 1):
            img = el.nth(n, x)
            if img:
                raise NotSingular(
                    "%s_(%d) does not annihilate the vector" % (name, n),
                    generator=name, mode=n, image=img)
            annihilation[(name, n)] = True
        if w2g == 4 and weight_eig is None:
            eig = el.nth(1, x)
            weight_eig = (eig == x.scale(p.ring.from_fraction(
                Fraction(w2x, 2))))
    for name in affine:
        img = p.gen(name).nth(0, x)
        if img:
            raise NotSingular(
                "affine zero mode %s_(0) does not annihilate the vector"
                % name, generator=name, mode=0, image=img)
        zero_modes[name] = True
    return SingularCertificate(p, k0, x, annihilation, zero_modes, weight_eig)


def pairing_radical_check(p, x):
    """Independent ideal-membership oracle: x of weight w lies in the radical
    of the invariant pairing iff M_(2w-1) x = 0 for every weight-w monomial M
    (all top products with the full weight space vanish)."""
    w2 = x.weight2()
    top = w2 - 1
    for mono in p.weight_basis(Fraction(w2, 2)):
        if Element(p, {mono: p.ring.one}).nth(top, x):
            return False
    return True


# ---------------------------------------------------------------------------
# pole sets
# ---------------------------------------------------------------------------

class PoleFamily:
    """The parametric family n -> (num0 + num1 n) / (den0 + den1 n), n >= n_min."""

    def __init__(self, num0, num1, den0, den1, n_min=0):
        g = math.gcd(math.gcd(abs(num0), abs(num1)),
                     math.gcd(abs(den0), abs(den1)))
        if g:
            num0, num1, den0, den1 = (num0 // g, num1 // g,
                                      den0 // g, den1 // g)
        if (den1, den0) < (0, 0) or (den1 == 0 and den0 < 0) or \
                (den1 < 0):
            num0, num1, den0, den1 = -num0, -num1, -den0, -den1
        self.data = (num0, num1, den0, den1, n_min)

    def value(self, n):
        num0, num1, den0, den1, _ = self.data
        return QQ(num0 + num1 * n, den0 + den1 * n)

    def contains(self, r):
        num0, num1, den0, den1, n_min = self.data
        r = QQ(r)
        a = QQ(num1) - r * den1
        b = r * den0 - QQ(num0)
        if not a:
            return False
        n = b / a
        fr = Fraction(n)
        return fr.denominator == 1 and fr.numerator >= n_min

    def __eq__(self, other):
        return isinstance(other, PoleFamily) and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __repr__(self):
        num0, num1, den0, den1, n_min = self.data
        return "{(%d%+d n)/(%d%+d n) : n >= %d}" % (num0, num1, den0, den1,
                                                    n_min)


class PoleSet:
    """An at-most-countable set of levels: finitely many rationals plus
    parametric families; membership of rationals is decidable."""

    def __init__(self, finite=(), families=(), unresolved=()):
        self.finite = sorted(set(QQ(x) for x in finite))
        self.families = sorted(set(families), key=lambda f: f.data)
        self.unresolved = list(unresolved)

    def contains(self, r):
        r = QQ(r)
        return r in self.finite or any(f.contains(r) for f in self.families)

    def matches(self, other):
        """Equality as described sets: identical families, and each finite
        member contained in the other side."""
        if self.families != other.families:
            return False
        if self.unresolved or other.unresolved:
            return False
        return (all(other.contains(x) for x in self.finite)
                and all(self.contains(x) for x in other.finite))

    def __repr__(self):
        bits = [repr([str(x) for x in self.finite])]
        bits += [repr(f) for f in self.families]
        if self.unresolved:
            bits.append("unresolved=%r" % (self.unresolved,))
        return "PoleSet(%s)" % " u ".join(bits)


def structure_pole_set(parts, families=()):
    """Union of the denominator root sets across all coefficients of the
    given OPE data (SingularPart or Element values), merged with the supplied
    parametric families.  Non-rational denominator factors are reported in
    ``unresolved`` rather than guessed."""
    finite = set()
    unresolved = []
    for part in parts:
        if isinstance(part, SingularPart):
            elements = [e for _, e in part.items()]
        else:
            elements = [part]
        for e in elements:
            for c in e.terms.values():
                if not isinstance(c, RationalFunction):
                    continue
                roots, rem = c.denominator_roots()
                finite.update(roots)
                if rem:
                    unresolved.append(rem)
    return PoleSet(finite, families, unresolved)


def sp4_pole_families():
    """The degenerate-level data of the sp_4 coset family: levels where the
    bootstrap coefficient f(k, n) vanishes or is undefined."""
    return [QQ(-9, 2), QQ(-3)], [PoleFamily(-7, -5, 2, 2, 1),
                                 PoleFamily(-14, -5, 4, 2, 1)]


def sl4_pole_families():
    """Same for the sl_4 coset family."""
    return [QQ(-4)], [PoleFamily(-5, -3, 1, 1, 0)]


def expected_pole_set(which):
    finite, fams = sp4_pole_families() if which == "sp4" else sl4_pole_families()
    return PoleSet(finite, fams)
