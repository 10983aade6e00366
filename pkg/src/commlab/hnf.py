"""Hermite normal form over the Laurent polynomial ring F2[s, 1/s].

The ring is a PID whose units are the powers of s, so every full-rank
submodule of a free module has a canonical triangular basis: upper
triangular, each diagonal entry a polynomial with nonzero constant term
(monic is automatic over F2), and every entry above a diagonal reduced
to its canonical representative modulo that diagonal.  Submodule
equality is then a syntactic check.

Matrices here are plain tuples of tuples of F2LaurentPoly; row spans
are the submodules.  The echelon routine tracks a unimodular transform,
which also yields left kernels and module intersections.
"""

from __future__ import annotations

from .errors import SingularMatrix
from .f2poly import F2LaurentPoly, mask_deg, mask_divmod, mask_mod, mask_mul

_ZERO = F2LaurentPoly.zero()
_ONE = F2LaurentPoly.one()


def _laurent_quot(a: F2LaurentPoly, b: F2LaurentPoly) -> F2LaurentPoly:
    """q with a - q*b of smaller normalized degree than b (b != 0)."""
    q, _ = mask_divmod(a.mask, b.mask)
    return F2LaurentPoly._raw(q, a.shift - b.shift)


def _laurent_rep(a: F2LaurentPoly, d: F2LaurentPoly) -> F2LaurentPoly:
    """Canonical representative of a modulo the ideal (d), d with nonzero
    constant term: the unique polynomial of degree < deg d."""
    dm = d.mask
    if dm == 1:
        return _ZERO
    am, k = a.mask, a.shift
    if k >= 0:
        return F2LaurentPoly._raw(mask_mod(am << k, dm), 0)
    # s is invertible mod d: s^-1 = (d+1)/s
    sinv = (dm ^ 1) >> 1
    r = mask_mod(am, dm)
    for _ in range(-k):
        r = mask_mod(mask_mul(r, sinv), dm)
    return F2LaurentPoly._raw(r, 0)


def _row_add(rows, i, j, q):
    """rows[i] += q * rows[j] (characteristic 2)."""
    rows[i] = [a + q * b for a, b in zip(rows[i], rows[j])]


def row_echelon(mat):
    """Canonical row echelon form over F2[s, 1/s] with transform.

    Returns (H, U, pivots) with H = U*mat, U invertible over the ring,
    zero rows of H at the bottom, pivot entries unit-normalized and the
    entries above each pivot reduced modulo it.
    """
    H = [list(row) for row in mat]
    nr = len(H)
    nc = len(H[0]) if nr else 0
    U = [[_ONE if i == j else _ZERO for j in range(nr)] for i in range(nr)]
    pivots = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        live = [i for i in range(r, nr) if H[i][c]]
        if not live:
            continue
        while len(live) > 1:
            live.sort(key=lambda i: mask_deg(H[i][c].mask))
            base = live[0]
            for i in live[1:]:
                q = _laurent_quot(H[i][c], H[base][c])
                _row_add(H, i, base, q)
                _row_add(U, i, base, q)
            live = [i for i in live if H[i][c]]
        p = live[0]
        H[r], H[p] = H[p], H[r]
        U[r], U[p] = U[p], U[r]
        sh = H[r][c].shift
        if sh:
            unit = F2LaurentPoly.t_power(-sh)
            H[r] = [unit * x for x in H[r]]
            U[r] = [unit * x for x in U[r]]
        pivots.append(c)
        r += 1
    for pr, pc in enumerate(pivots):
        d = H[pr][pc]
        for i in range(pr):
            a = H[i][pc]
            if a.is_zero():
                continue
            rep = _laurent_rep(a, d)
            if rep != a:
                q = (a + rep).exact_div(d)
                _row_add(H, i, pr, q)
                _row_add(U, i, pr, q)
    return (
        tuple(tuple(row) for row in H),
        tuple(tuple(row) for row in U),
        tuple(pivots),
    )


def hnf_f2poly(mat):
    """Hermite normal form (H, U) of a square matrix, H = U*mat.

    Requires det != 0 up to powers of s; raises SingularMatrix otherwise.
    """
    mat = tuple(tuple(row) for row in mat)
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("matrix must be square")
    if n == 0:
        return (), ()
    H, U, pivots = row_echelon(mat)
    if len(pivots) < n:
        raise SingularMatrix("matrix is singular over F2[s, 1/s]")
    return H, U


def is_hnf(mat) -> bool:
    """Check the canonical-form invariants used by submodule_index."""
    n = len(mat)
    for i, row in enumerate(mat):
        if len(row) != n:
            return False
        for j, x in enumerate(row):
            if j < i and not x.is_zero():
                return False
            if j == i and (x.is_zero() or x.shift != 0):
                return False
            if j > i and not x.is_zero():
                d = mat[j][j]
                if x.shift < 0 or x.max_exp >= mask_deg(d.mask):
                    return False
    return True


def submodule_index(mat) -> int:
    """log2 of the index of the row span inside the free module.

    The input must be in Hermite normal form; the answer is the sum of
    the diagonal degrees.
    """
    if not is_hnf(tuple(tuple(row) for row in mat)):
        raise ValueError("matrix is not in Hermite normal form")
    return sum(mask_deg(row[i].mask) for i, row in enumerate(mat))


def left_kernel(mat):
    """Generators of {y : y*mat = 0} over F2[s, 1/s], as rows."""
    H, U, pivots = row_echelon(mat)
    return tuple(U[r] for r in range(len(pivots), len(H)))


def row_times_mat(y, mat):
    """Row vector times matrix over F2[s, 1/s]."""
    nc = len(mat[0]) if mat else 0
    out = [_ZERO] * nc
    for coef, row in zip(y, mat):
        if coef.is_zero():
            continue
        for j in range(nc):
            out[j] = out[j] + coef * row[j]
    return tuple(out)


def module_from_rows(rows, n: int):
    """HNF basis of the span of the given generator rows.

    The span must have full rank n.
    """
    if not rows:
        raise SingularMatrix("no generators")
    H, _, pivots = row_echelon(rows)
    if len(pivots) < n:
        raise SingularMatrix("generators do not span a finite-index submodule")
    return tuple(H[i] for i in range(n))


def module_intersect(ha, hb, n: int):
    """HNF basis of rowspan(ha) & rowspan(hb), both full rank n."""
    stacked = tuple(ha) + tuple(hb)
    gens = [row_times_mat(y[: len(ha)], ha) for y in left_kernel(stacked)]
    return module_from_rows(gens, n)


def solve_membership(hmat, vec):
    """Coefficients y with y*hmat = vec over F2[s, 1/s], or None.

    hmat must be square, full rank and upper triangular (e.g. in HNF).
    """
    n = len(hmat)
    y = []
    for c in range(n):
        acc = vec[c]
        for i in range(c):
            acc = acc + y[i] * hmat[i][c]
        q = acc.exact_div(hmat[c][c])
        if q is None:
            return None
        y.append(q)
    return tuple(y)
