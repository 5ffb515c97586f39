"""Exact linear algebra over Q and Q(k) on sparse columns.

Columns are dicts mapping hashable row keys to nonzero field elements.  The
incremental column elimination keeps, for every pivot, the combination of
original columns that produced it, so kernels and solutions come out in the
original column coordinates.  Pivot choice is deterministic (smallest row
key), which makes kernel bases canonical and therefore interpolable across
specializations.
"""


def _reduce(vec, combo, pivots):
    for prow, pvec, pcombo in pivots:
        f = vec.get(prow)
        if f:
            for r, v in pvec.items():
                nv = vec.get(r, 0) - f * v
                if nv:
                    vec[r] = nv
                elif r in vec:
                    del vec[r]
            for i, v in pcombo.items():
                nv = combo.get(i, 0) - f * v
                if nv:
                    combo[i] = nv
                elif i in combo:
                    del combo[i]
    return vec, combo


def _normalize(vec, combo, one):
    prow = min(vec)
    lead = vec[prow]
    if lead != one:
        inv = one / lead
        vec = {r: inv * v for r, v in vec.items()}
        combo = {i: inv * v for i, v in combo.items()}
    return prow, vec, combo


def kernel_of_columns(cols, one):
    """Kernel vectors (as {column index: coefficient} dicts, coefficient of
    the defining column normalized to 1) of the matrix with the given sparse
    columns."""
    pivots = []
    kernel = []
    for j, col in enumerate(cols):
        vec, combo = _reduce(dict(col), {j: one}, pivots)
        if vec:
            pivots.append(_normalize(vec, combo, one))
        else:
            kernel.append(combo)
    return kernel


def solve_in_columns(cols, target, one):
    """Coefficients x with sum x_j col_j = target, or None if inconsistent.
    Requires the columns to be linearly independent for uniqueness; returns
    (solution, independent) where independent is False if some column was
    dependent."""
    pivots = []
    independent = True
    for j, col in enumerate(cols):
        vec, combo = _reduce(dict(col), {j: one}, pivots)
        if vec:
            pivots.append(_normalize(vec, combo, one))
        else:
            independent = False
    vec, combo = _reduce(dict(target), {}, pivots)
    if vec:
        return None, independent
    return {i: -v for i, v in combo.items()}, independent


def rref_rows(rows, width, one):
    """Reduced row echelon form of dense rows; returns (rows, pivot_cols)."""
    rows = [list(r) for r in rows]
    pivot_cols = []
    r = 0
    for c in range(width):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = one / rows[r][c]
        rows[r] = [inv * v for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivot_cols.append(c)
        r += 1
    return rows[:r], pivot_cols


_HMOD = (1 << 61) - 1


def row_hash(mono, seed):
    """Deterministic hash of a monomial row key (independent of PYTHONHASHSEED)."""
    h = 1469598103934665603 ^ (seed * 1099511628211 + 12345)
    h %= _HMOD
    for g, d in mono:
        h = (h * 1000003 + 31 * g + 7 * d + 11) % _HMOD
    return h


class RowSampler:
    """Deterministic pseudo-random row selector used to project huge sparse
    systems before exact elimination; candidate kernels are always verified
    against the full data afterwards."""

    def __init__(self, seed, keep_num, keep_den):
        self.seed = seed
        self.keep_num = keep_num
        self.keep_den = keep_den

    def __call__(self, mono):
        return (row_hash(mono, self.seed) % self.keep_den) < self.keep_num

    def project(self, terms):
        return {m: c for m, c in terms.items() if self(m)}
