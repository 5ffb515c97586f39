"""Independent graded-dimension oracle: Molien-Weyl constant-term computation
of invariant dimensions in graded free-field state spaces, free Euler-product
series, and generator/relation weight inference.

Torus integration is iterated formal constant-term extraction: q-series whose
coefficients are exact Laurent polynomials in the torus variables, multiplied
by the Weyl density and averaged over components for disconnected groups.
All arithmetic is exact; a non-integer or negative coefficient signals a bug
and raises.
"""

from fractions import Fraction

from .scalars import QQ


class MolienError(ValueError):
    pass


class UnsupportedGroup(MolienError):
    pass


# -- Laurent polynomials: dict exponent-tuple -> QQ --------------------------

def _lmul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(e, 0) + ca * cb
            if v:
                out[e] = v
            elif e in out:
                del out[e]
    return out


def _lshift(a, mu):
    return {tuple(x + y for x, y in zip(e, mu)): c for e, c in a.items()}


def _ladd_into(acc, b, scale=1):
    for e, c in b.items():
        v = acc.get(e, 0) + scale * c
        if v:
            acc[e] = v
        elif e in acc:
            del acc[e]


class GroupSpec:
    """A supported reductive group with its torus data and Weyl density.

    Components beyond the identity (for O(1), O(2)) are handled by averaging:
    the plethystic character is a class function, constant on each component.
    """

    NAMES = ("trivial", "U1", "SU2", "Sp2", "U2", "USp4", "O1", "O2")

    def __init__(self, name):
        if name == "Sp2":
            name = "SU2"  # Sp(2) ~ SU(2)
        if name not in self.NAMES:
            raise UnsupportedGroup("unsupported group %r" % name)
        self.name = name
        self.torus_rank = {"trivial": 0, "U1": 1, "SU2": 1, "U2": 2,
                           "USp4": 2, "O1": 0, "O2": 1}[name]
        roots = {"trivial": [], "U1": [], "O1": [], "O2": [],
                 "SU2": [(2,), (-2,)],
                 "U2": [(1, -1), (-1, 1)],
                 "USp4": [(2, 0), (-2, 0), (0, 2), (0, -2),
                          (1, 1), (-1, -1), (1, -1), (-1, 1)]}[name]
        self.weyl_order = {"trivial": 1, "U1": 1, "O1": 1, "O2": 1,
                           "SU2": 2, "U2": 2, "USp4": 8}[name]
        dens = {(0,) * self.torus_rank: QQ(1)}
        for alpha in roots:
            dens = _lmul(dens, {(0,) * self.torus_rank: QQ(1),
                                alpha: QQ(-1)})
        self.weyl_density = dens
        # (component weight, is_identity); reflection data per rep
        if name == "O1":
            self.components = [("id", Fraction(1, 2)), ("refl", Fraction(1, 2))]
        elif name == "O2":
            self.components = [("id", Fraction(1, 2)), ("refl", Fraction(1, 2))]
        else:
            self.components = [("id", Fraction(1))]

    def rep_weights(self, label):
        """Torus weights of a representation label on the identity component."""
        name = self.name
        if name == "trivial":
            dim = 1 if label in ("triv", None) else int(label)
            return [()] * dim
        if name == "U1":
            if label in ("triv",):
                return [(0,)]
            if isinstance(label, int):
                return [(label,)]
            return [(int(q),) for q in label]
        if name == "SU2":
            return {"triv": [(0,)], "std": [(1,), (-1,)],
                    "adj": [(2,), (0,), (-2,)]}[label]
        if name == "U2":
            return {"triv": [(0, 0)], "std": [(1, 0), (0, 1)],
                    "dual": [(-1, 0), (0, -1)]}[label]
        if name == "USp4":
            return {"triv": [(0, 0)],
                    "std": [(1, 0), (-1, 0), (0, 1), (0, -1)]}[label]
        if name == "O1":
            return {"triv": [()], "sign": [()]}[label]
        if name == "O2":
            return {"triv": [(0,)], "std": [(1,), (-1,)],
                    "det": [(0,)]}[label]
        raise UnsupportedGroup(name)

    def rep_reflection_eigenvalues(self, label):
        """Eigenvalues of a fixed reflection-component element (O(1), O(2))."""
        if self.name == "O1":
            return {"triv": [1], "sign": [-1]}[label]
        if self.name == "O2":
            return {"triv": [1], "std": [1, -1], "det": [-1]}[label]
        raise UnsupportedGroup("no reflection component for %s" % self.name)


class GradedModuleSpec:
    """Generators of a graded free (super)algebra: a list of
    (representation label, conformal weight, parity) entries; each generator
    contributes derivative copies in weights w, w+1, w+2, ..."""

    def __init__(self, entries):
        self.entries = []
        for rep, weight, parity in entries:
            w2 = int(2 * Fraction(weight))
            if w2 <= 0:
                raise MolienError("generator weights must be positive")
            par = {0: 0, 1: 1, "even": 0, "odd": 1}[parity]
            self.entries.append((rep, w2, par))


class GradedSeries:
    """Exact coefficients indexed by twice the conformal weight."""

    def __init__(self, coeffs2, cutoff2):
        self.coeffs2 = list(coeffs2)
        self.cutoff2 = cutoff2

    def __getitem__(self, weight):
        w2 = int(2 * Fraction(weight))
        if w2 > self.cutoff2:
            raise IndexError("beyond series cutoff")
        return self.coeffs2[w2] if 0 <= w2 < len(self.coeffs2) else 0

    def weights(self):
        return [Fraction(w2, 2) for w2 in range(self.cutoff2 + 1)]

    def agrees_with(self, other, through=None):
        top = min(self.cutoff2, other.cutoff2)
        if through is not None:
            top = min(top, int(2 * Fraction(through)))
        return all(self[Fraction(w2, 2)] == other[Fraction(w2, 2)]
                   for w2 in range(top + 1))

    def first_difference(self, other):
        top = min(self.cutoff2, other.cutoff2)
        for w2 in range(top + 1):
            if self[Fraction(w2, 2)] != other[Fraction(w2, 2)]:
                return Fraction(w2, 2)
        return None

    def truncate(self, cutoff):
        c2 = int(2 * Fraction(cutoff))
        return GradedSeries(self.coeffs2[:c2 + 1], c2)

    def __mul__(self, other):
        c2 = min(self.cutoff2, other.cutoff2)
        out = [0] * (c2 + 1)
        for i in range(c2 + 1):
            a = self.coeffs2[i] if i < len(self.coeffs2) else 0
            if not a:
                continue
            for j in range(c2 + 1 - i):
                b = other.coeffs2[j] if j < len(other.coeffs2) else 0
                if b:
                    out[i + j] += a * b
        return GradedSeries(out, c2)

    def __eq__(self, other):
        return (isinstance(other, GradedSeries)
                and self.cutoff2 == other.cutoff2
                and self.coeffs2 == other.coeffs2)

    def __repr__(self):
        bits = []
        for w2, c in enumerate(self.coeffs2):
            if c:
                w = Fraction(w2, 2)
                bits.append("%s q^%s" % (c, w))
        return "GradedSeries(%s)" % " + ".join(bits or ["0"])


def _series_identity_component(group, module, w2max):
    """q-series with Laurent-polynomial coefficients for the identity
    component, before Weyl integration."""
    rank = group.torus_rank
    zero = (0,) * rank
    series = [dict() for _ in range(w2max + 1)]
    series[0][zero] = QQ(1)
    for rep, w2, par in module.entries:
        for mu in group.rep_weights(rep):
            mu = tuple(mu)
            m = 0
            while w2 + 2 * m <= w2max:
                step = w2 + 2 * m
                if par == 0:
                    # multiply by 1/(1 - q^step z^mu)
                    for tw in range(step, w2max + 1):
                        lower = series[tw - step]
                        if lower:
                            _ladd_into(series[tw], _lshift(lower, mu))
                else:
                    # multiply by (1 + q^step z^mu)
                    for tw in range(w2max, step - 1, -1):
                        lower = series[tw - step]
                        if lower:
                            _ladd_into(series[tw], _lshift(lower, mu))
                m += 1
    return series


def _series_reflection_component(group, module, w2max):
    """Scalar q-series of the reflection component (class function value)."""
    series = [QQ(0)] * (w2max + 1)
    series[0] = QQ(1)
    for rep, w2, par in module.entries:
        for lam in group.rep_reflection_eigenvalues(rep):
            m = 0
            while w2 + 2 * m <= w2max:
                step = w2 + 2 * m
                if par == 0:
                    for tw in range(step, w2max + 1):
                        series[tw] += lam * series[tw - step]
                else:
                    for tw in range(w2max, step - 1, -1):
                        series[tw] += lam * series[tw - step]
                m += 1
    return series


def molien_series(group, module, cutoff):
    """Graded dimensions of the G-invariants in the free (super)algebra on
    the module, as exact integers up to the cutoff weight."""
    if not isinstance(group, GroupSpec):
        group = GroupSpec(group)
    if not isinstance(module, GradedModuleSpec):
        module = GradedModuleSpec(module)
    w2max = int(2 * Fraction(cutoff))
    total = [Fraction(0)] * (w2max + 1)
    for kind, weight in group.components:
        if kind == "id":
            series = _series_identity_component(group, module, w2max)
            inv_w = Fraction(1, group.weyl_order)
            zero = (0,) * group.torus_rank
            for tw in range(w2max + 1):
                if not series[tw]:
                    continue
                ct = _lmul(series[tw], group.weyl_density).get(zero, QQ(0))
                total[tw] += weight * inv_w * Fraction(ct)
        else:
            series = _series_reflection_component(group, module, w2max)
            for tw in range(w2max + 1):
                total[tw] += weight * Fraction(series[tw])
    coeffs = []
    for tw, c in enumerate(total):
        if c.denominator != 1 or c < 0:
            raise MolienError(
                "non-integer or negative invariant dimension %s at weight %s"
                % (c, Fraction(tw, 2)))
        coeffs.append(int(c))
    if coeffs and coeffs[0] != 1:
        raise MolienError("weight-0 coefficient must be 1")
    return GradedSeries(coeffs, w2max)


def free_type_series(weights, cutoff, parities=None):
    """Euler-product graded dimension of a freely generated algebra with one
    generator per listed weight (plus all derivatives)."""
    ws = list(weights)
    if parities is None:
        parities = [0] * len(ws)
    w2max = int(2 * Fraction(cutoff))
    series = [1] + [0] * w2max
    for w, par in zip(ws, parities):
        w2 = int(2 * Fraction(w))
        if w2 <= 0:
            raise MolienError("generator weights must be positive")
        m = 0
        while w2 + 2 * m <= w2max:
            step = w2 + 2 * m
            if par == 0:
                for tw in range(step, w2max + 1):
                    series[tw] += series[tw - step]
            else:
                for tw in range(w2max, step - 1, -1):
                    series[tw] += series[tw - step]
            m += 1
    return GradedSeries(series, w2max)


class TypeReport:
    def __init__(self, generator_weights, first_relation_weight, deficit):
        self.generator_weights = generator_weights
        self.first_relation_weight = first_relation_weight
        self.deficit = deficit

    def __repr__(self):
        gens = ",".join(str(w) for w in self.generator_weights)
        if self.first_relation_weight is None:
            return "W(%s), no relation up to cutoff" % gens
        return "W(%s), first relation at weight %s (deficit %d)" % (
            gens, self.first_relation_weight, self.deficit)


def infer_type(series, cutoff=None):
    """Greedy generator/relation inference: add a generator whenever the
    series exceeds the running free count, and report the first weight where
    the series falls short (necessary-but-not-sufficient evidence of
    minimality; the gap is recorded, not bridged)."""
    w2max = series.cutoff2 if cutoff is None else int(2 * Fraction(cutoff))
    gens = []
    for tw in range(1, w2max + 1):
        w = Fraction(tw, 2)
        free = free_type_series(gens, w)[w] if gens else (1 if tw == 0 else 0)
        actual = series[w]
        if actual > free:
            gens.extend([w] * (actual - free))
        elif actual < free:
            return TypeReport(gens, w, free - actual)
    return TypeReport(gens, None, 0)


# ---------------------------------------------------------------------------
# engine-side cross-check: invariants via a Lie algebra annihilator
# ---------------------------------------------------------------------------

def invariant_dimension_by_annihilator(p, actions, weight):
    """Dimension of the joint kernel of Lie algebra generators acting as
    derivations on the weight space of the presentation.

    ``actions`` is a list of maps {generator index: {generator index: coeff}}
    giving the action on generators; it extends factor-wise to monomials,
    re-normalizing where the substitution breaks the canonical order.  This
    is the finite-dimensional oracle used to cross-check the Molien series.
    """
    from .core import Element
    from .linalg import kernel_of_columns

    basis = p.weight_basis(weight)
    if not basis:
        return 0
    cols = []
    for mono in basis:
        col = {}
        for ai, act in enumerate(actions):
            img = {}
            for i, (g, d) in enumerate(mono):
                for g2, c in act.get(g, {}).items():
                    seq = mono[:i] + ((g2, d),) + mono[i + 1:]
                    for m2, c2 in p.engine.normalize_sequence(seq).items():
                        v = img.get(m2, p.ring.zero) + c * c2
                        if v:
                            img[m2] = v
                        elif m2 in img:
                            del img[m2]
            for m2, c2 in img.items():
                col[(ai, m2)] = c2
        cols.append(col)
    kern = kernel_of_columns(cols, p.ring.one)
    return len(kern)
