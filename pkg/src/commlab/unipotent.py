"""Unitriangular groups over Q and their S-integer subgroups.

Everything is exact: the matrix logarithm and exponential are finite
sums for unitriangular/nilpotent matrices, p-th roots are exp(log/p),
and automorphisms of the group correspond to bracket-preserving linear
maps on the strictly-upper-triangular matrices.  A congruence-depth
scan realizes each such automorphism as a commensuration of the
S-integer points.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotAnAutomorphism, SingularMap
from .matrices import MatQ

DIMENSION_CAP = 12


def set_dimension_cap(n: int) -> None:
    """Raise or lower the size bound (factorial denominators grow with it)."""
    global DIMENSION_CAP
    DIMENSION_CAP = n


class UniTriMat:
    """Upper unitriangular matrix with exact rational entries."""

    __slots__ = ("n", "mat")

    def __init__(self, mat):
        mat = mat if isinstance(mat, MatQ) else MatQ(mat)
        n = mat.nrows
        if mat.ncols != n:
            raise ValueError("matrix must be square")
        if n > DIMENSION_CAP:
            raise ValueError(f"dimension capped at {DIMENSION_CAP}")
        for i in range(n):
            if mat.entry(i, i) != 1:
                raise ValueError("diagonal entries must be 1")
            for j in range(i):
                if mat.entry(i, j):
                    raise ValueError("matrix must be upper triangular")
        self.n = n
        self.mat = mat

    @classmethod
    def identity(cls, n: int) -> "UniTriMat":
        return cls(MatQ.identity(n))

    def __mul__(self, other):
        if not isinstance(other, UniTriMat):
            return NotImplemented
        return UniTriMat(self.mat * other.mat)

    def inverse(self) -> "UniTriMat":
        return UniTriMat(self.mat.inv())

    def __pow__(self, e: int) -> "UniTriMat":
        if e < 0:
            return self.inverse() ** (-e)
        out = UniTriMat.identity(self.n)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, UniTriMat) and self.mat == other.mat

    def __hash__(self):
        return hash(self.mat)

    def __repr__(self):
        return f"UniTriMat({self.mat.to_strings()})"


class NilMat:
    """Strictly upper triangular rational matrix (a nilpotent Lie element)."""

    __slots__ = ("n", "mat")

    def __init__(self, mat):
        mat = mat if isinstance(mat, MatQ) else MatQ(mat)
        n = mat.nrows
        if mat.ncols != n:
            raise ValueError("matrix must be square")
        for i in range(n):
            for j in range(i + 1):
                if mat.entry(i, j):
                    raise ValueError("matrix must be strictly upper triangular")
        self.n = n
        self.mat = mat

    @classmethod
    def zero(cls, n: int) -> "NilMat":
        return cls(MatQ.zeros(n, n))

    def __add__(self, other):
        return NilMat(self.mat + other.mat)

    def __eq__(self, other):
        return isinstance(other, NilMat) and self.mat == other.mat

    def __hash__(self):
        return hash(self.mat)

    def __repr__(self):
        return f"NilMat({self.mat.to_strings()})"

    def bracket(self, other: "NilMat") -> "NilMat":
        return NilMat(self.mat * other.mat - other.mat * self.mat)


def unitri_log(g: UniTriMat) -> NilMat:
    """Exact logarithm: the alternating finite series in (g - I)."""
    n = g.n
    x = g.mat - MatQ.identity(n)
    acc = MatQ.zeros(n, n)
    power = x
    for k in range(1, n):
        term = power * Fraction((-1) ** (k + 1), k)
        acc = acc + term
        power = power * x
    return NilMat(acc)


def unitri_exp(x: NilMat) -> UniTriMat:
    """Exact exponential: the finite series sum of x**k / k!."""
    n = x.n
    acc = MatQ.identity(n)
    power = MatQ.identity(n)
    fact = 1
    for k in range(1, n):
        power = power * x.mat
        fact *= k
        acc = acc + power * Fraction(1, fact)
    return UniTriMat(acc)


def pth_root(g: UniTriMat, p: int) -> UniTriMat:
    """The unique unitriangular solution of X**p = g (any p >= 1)."""
    if p < 1:
        raise ValueError("p must be a positive integer")
    x = unitri_log(g)
    return unitri_exp(NilMat(x.mat * Fraction(1, p)))


def is_s_integral(g, primes) -> bool:
    """Whether every entry denominator factors inside the prime set."""
    mat = g.mat if isinstance(g, (UniTriMat, NilMat)) else g
    for row in mat.rows:
        for x in row:
            d = x.denominator
            for p in primes:
                while d % p == 0:
                    d //= p
            if d != 1:
                return False
    return True


# ---------------------------------------------------------------------------
# Lie algebra automorphisms and the commensurations they induce


def _basis_pairs(n: int):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


class LieAut:
    """Invertible linear map on the strictly upper triangular matrices,
    stored in the elementary-matrix basis E(i, j), i < j, ordered
    lexicographically.  Whether it preserves the bracket is checked by
    lie_aut_check, not assumed."""

    __slots__ = ("n", "mat", "_checked")

    def __init__(self, n: int, mat):
        mat = mat if isinstance(mat, MatQ) else MatQ(mat)
        dim = n * (n - 1) // 2
        if mat.nrows != dim or mat.ncols != dim:
            raise ValueError(f"expected a {dim} x {dim} matrix for n = {n}")
        if dim and not mat.det():
            raise SingularMap("the linear map must be invertible")
        self.n = n
        self.mat = mat
        self._checked = None

    @classmethod
    def identity(cls, n: int) -> "LieAut":
        return cls(n, MatQ.identity(n * (n - 1) // 2))

    @classmethod
    def diagonal(cls, n: int, scales) -> "LieAut":
        """Map scaling each basis element E(i, j) by the given factor."""
        dim = n * (n - 1) // 2
        scales = [Fraction(s) for s in scales]
        if len(scales) != dim:
            raise ValueError("one scale per basis element")
        rows = [
            [scales[i] if i == j else Fraction(0) for j in range(dim)]
            for i in range(dim)
        ]
        return cls(n, rows)

    def to_vec(self, x: NilMat):
        return [x.mat.entry(i, j) for (i, j) in _basis_pairs(self.n)]

    def from_vec(self, vec) -> NilMat:
        n = self.n
        rows = [[Fraction(0)] * n for _ in range(n)]
        for v, (i, j) in zip(vec, _basis_pairs(n)):
            rows[i][j] = Fraction(v)
        return NilMat(rows)

    def apply(self, x: NilMat) -> NilMat:
        vec = MatQ.column(self.to_vec(x))
        out = self.mat * vec
        return self.from_vec([out.entry(i, 0) for i in range(out.nrows)])

    def compose(self, other: "LieAut") -> "LieAut":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return LieAut(self.n, self.mat * other.mat)

    def __eq__(self, other):
        return isinstance(other, LieAut) and self.n == other.n and self.mat == other.mat

    def __hash__(self):
        return hash((self.n, self.mat))


def lie_aut_check(aut: LieAut) -> bool:
    """Exact test that the map preserves all basis brackets."""
    if aut._checked is not None:
        return aut._checked
    pairs = _basis_pairs(aut.n)
    basis = [aut.from_vec([1 if k == idx else 0 for k in range(len(pairs))])
             for idx in range(len(pairs))]
    images = [aut.apply(b) for b in basis]
    ok = True
    for a in range(len(pairs)):
        for b in range(len(pairs)):
            lhs = aut.apply(basis[a].bracket(basis[b]))
            rhs = images[a].bracket(images[b])
            if lhs != rhs:
                ok = False
                break
        if not ok:
            break
    aut._checked = ok
    return ok


def comm_from_lie_aut(aut: LieAut, g: UniTriMat) -> UniTriMat:
    """exp(aut(log g)); a homomorphism in g when aut preserves brackets."""
    if not lie_aut_check(aut):
        raise NotAnAutomorphism("the linear map does not preserve brackets")
    if g.n != aut.n:
        raise ValueError("dimension mismatch")
    return unitri_exp(aut.apply(unitri_log(g)))


# ---------------------------------------------------------------------------
# congruence depth of the induced commensuration


class _MPoly:
    """Sparse multivariate polynomial over Q; monomials are sorted
    tuples of variable indices (with multiplicity)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = dict(terms or {})

    @classmethod
    def const(cls, c) -> "_MPoly":
        c = Fraction(c)
        return cls({(): c} if c else {})

    @classmethod
    def var(cls, idx: int) -> "_MPoly":
        return cls({(idx,): Fraction(1)})

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            c2 = out.get(m, 0) + c
            if c2:
                out[m] = c2
            else:
                out.pop(m, None)
        return _MPoly(out)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return _MPoly()
            return _MPoly({m: c * other for m, c in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                c = out.get(m, 0) + c1 * c2
                if c:
                    out[m] = c
                else:
                    out.pop(m, None)
        return _MPoly(out)

    __rmul__ = __mul__


def _poly_mat_mul(a, b, n):
    return [
        [
            sum((a[i][k] * b[k][j] for k in range(n)), _MPoly())
            for j in range(n)
        ]
        for i in range(n)
    ]


def _factor_multiplicity(den: int, q: int) -> int:
    v = 0
    while den % q == 0:
        den //= q
        v += 1
    return v


def _prime_factors(n: int) -> set:
    out = set()
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.add(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.add(n)
    return out


def congruence_domain(aut: LieAut, primes) -> int:
    """Least D = P**e making the induced map S-integral on the depth-D
    congruence subgroup.

    P is the product of the primes outside S occurring in denominators
    of the map and of the exp/log factorials for this size, and e is
    the least exponent for which every coefficient of the symbolic
    composite sends entries in D * Z[1/S] into Z[1/S].  The scan is a
    sufficient certificate; minimality beyond the scanned form is not
    claimed.
    """
    if not lie_aut_check(aut):
        raise NotAnAutomorphism("the linear map does not preserve brackets")
    primes = set(primes)
    n = aut.n
    outside = set()
    for row in aut.mat.rows:
        for x in row:
            outside |= _prime_factors(x.denominator)
    for k in range(2, n):
        outside |= _prime_factors(k)
    outside -= primes
    # symbolic composite exp(aut(log(I + X)))
    pairs = _basis_pairs(n)
    var_of = {pair: idx for idx, pair in enumerate(pairs)}
    x = [[_MPoly() for _ in range(n)] for _ in range(n)]
    for (i, j), idx in var_of.items():
        x[i][j] = _MPoly.var(idx)
    acc = [[_MPoly() for _ in range(n)] for _ in range(n)]
    power = x
    for k in range(1, n):
        coef = Fraction((-1) ** (k + 1), k)
        for i in range(n):
            for j in range(n):
                acc[i][j] = acc[i][j] + power[i][j] * coef
        power = _poly_mat_mul(power, x, n)
    # apply the linear map coefficient-wise
    lmapped = [[_MPoly() for _ in range(n)] for _ in range(n)]
    for (i, j), idx in var_of.items():
        for (i2, j2), idx2 in var_of.items():
            coef = aut.mat.entry(idx2, idx)
            if coef:
                lmapped[i2][j2] = lmapped[i2][j2] + acc[i][j] * coef
    out = [[_MPoly.const(1 if i == j else 0) for j in range(n)] for i in range(n)]
    power = [[_MPoly.const(1 if i == j else 0) for j in range(n)] for i in range(n)]
    fact = 1
    for k in range(1, n):
        power = _poly_mat_mul(power, lmapped, n)
        fact *= k
        coef = Fraction(1, fact)
        for i in range(n):
            for j in range(n):
                out[i][j] = out[i][j] + power[i][j] * coef
    # least exponent clearing every coefficient
    e = 0
    for i in range(n):
        for j in range(n):
            for mono, coef in out[i][j].terms.items():
                deg = len(mono)
                den = coef.denominator
                for q in _prime_factors(den):
                    if q in primes:
                        continue
                    if q not in outside:
                        raise NotAnAutomorphism(
                            f"unexpected denominator prime {q}"
                        )
                    v = _factor_multiplicity(den, q)
                    e = max(e, -(-v // deg))  # ceil(v / deg)
    p_rad = 1
    for q in sorted(outside):
        p_rad *= q
    return p_rad**e if e else 1
