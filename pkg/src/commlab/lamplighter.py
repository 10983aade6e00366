"""The lamplighter group and its commensurations in canonical coordinates.

The group is K x| Z where K is the direct sum of copies of Z/2Z indexed
by Z and the generator t of Z shifts indices.  We model K additively as
F2 Laurent polynomials (the lamp at position i is t**i), so conjugation
by t**n is multiplication by t**n.

A commensuration is stored as a triple (der, lin, flip):

* ``der``    -- a virtual derivation, recorded by its level m >= 1 and
                its value v = tau(t**m) in K;
* ``lin``    -- a t**m-equivariant commensuration of K, i.e. an
                invertible m x m matrix over F2(s) acting on the
                coordinates of K in the basis (1, t, ..., t**(m-1))
                over F2[s, 1/s] with s = t**m;
* ``flip``   -- whether the class inverts the Z-direction
                (t -> 1/t, lamp i -> lamp -i).

The triple acts by (k, n) -> (lin(flip(k)) + tau(t**(eps*n)), eps*n)
with eps = -1 exactly when flip is set, and composition is right to
left.  Canonical forms use the minimal level from which each component
arises by raising, so equality of classes is equality of triples.

Conventions fixed here once and for all:

* flip conjugation of the linear part is A -> R * A(1/s) * R**-1 where
  R is the basis-reversal matrix with R[0][0] = 1 and
  R[m-j][j] = 1/s for j = 1, ..., m-1 (this is the coordinate matrix of
  k -> k(1/t) at level m);
* flip conjugation of a derivation value is v -> t**m * v(1/t).
"""

from __future__ import annotations

import math
import os
from functools import lru_cache

from . import hnf
from .errors import (
    ExponentMismatch,
    NotAHomomorphism,
    NotDivisible,
    OutOfDomain,
    SingularMatrix,
    WindowUnstable,
)
from .f2poly import (
    F2LaurentPoly,
    mask_divmod,
    mask_gcd,
    mask_lcm,
    mask_mod,
    mask_mul,
    mask_reverse,
    mask_spread,
)
from .matrices import MatF2Rat
from .polymat import BitMat, PolyMat, f2_rank
from .ratfun import F2RatFun

_ZERO = F2LaurentPoly.zero()
_ONE = F2LaurentPoly.one()


def window_width(level: int, max_degree: int) -> int:
    """Exponent half-width for windowed linear algebra.

    Defaults to 4 * (level + max_degree); the COMMLAB_WINDOW environment
    variable overrides it.
    """
    env = os.environ.get("COMMLAB_WINDOW")
    if env:
        return int(env)
    return 4 * (level + max_degree)


@lru_cache(maxsize=None)
def _divisors(n: int) -> tuple[int, ...]:
    return tuple(d for d in range(1, n + 1) if n % d == 0)


# ---------------------------------------------------------------------------
# group elements


class LampElement:
    """Element (k, n) of K x| Z; identity is (0, 0)."""

    __slots__ = ("k", "n")

    def __init__(self, k: F2LaurentPoly, n: int):
        self.k = k
        self.n = n

    @classmethod
    def identity(cls) -> "LampElement":
        return cls(_ZERO, 0)

    @classmethod
    def lamp(cls, i: int) -> "LampElement":
        return cls(F2LaurentPoly.t_power(i), 0)

    @classmethod
    def shift(cls, n: int = 1) -> "LampElement":
        return cls(_ZERO, n)

    def __mul__(self, other):
        if not isinstance(other, LampElement):
            return NotImplemented
        return LampElement(self.k + other.k.shifted(self.n), self.n + other.n)

    def inverse(self) -> "LampElement":
        return LampElement(self.k.shifted(-self.n), -self.n)

    def __pow__(self, e: int) -> "LampElement":
        if e < 0:
            return self.inverse() ** (-e)
        out = LampElement.identity()
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, LampElement) and self.k == other.k and self.n == other.n

    def __hash__(self):
        return hash((self.k, self.n))

    def __repr__(self):
        return f"LampElement({self.k.to_string()!r}, {self.n})"

    def to_json(self):
        return {"k": self.k.to_string(), "n": self.n}

    @classmethod
    def from_json(cls, obj) -> "LampElement":
        return cls(F2LaurentPoly.from_string(obj["k"]), int(obj["n"]))


def lamp_mul(g: LampElement, h: LampElement) -> LampElement:
    return g * h


def lamp_inv(g: LampElement) -> LampElement:
    return g.inverse()


# ---------------------------------------------------------------------------
# coordinates of K at a level


def k_to_coords(k: F2LaurentPoly, m: int) -> list[F2LaurentPoly]:
    """Coordinates of k in the basis (1, t, ..., t**(m-1)) over F2[s, 1/s]."""
    masks = [0] * m
    los = [None] * m
    mask, base = k.mask, k.shift
    while mask:
        low = mask & -mask
        e = base + low.bit_length() - 1
        j = e % m
        q = (e - j) // m
        if los[j] is None or q < los[j]:
            if los[j] is not None:
                masks[j] <<= los[j] - q
            los[j] = q
        masks[j] |= 1 << (q - los[j])
        mask &= mask - 1
    return [
        F2LaurentPoly._raw(masks[j], los[j] or 0) if masks[j] else _ZERO
        for j in range(m)
    ]


def coords_to_k(xs, m: int) -> F2LaurentPoly:
    out = _ZERO
    for j, x in enumerate(xs):
        if not x.is_zero():
            out = out + x.spread(m).shifted(j)
    return out


def flip_coords(xs, m: int) -> list[F2LaurentPoly]:
    """Coordinates of k(1/t) given the coordinates of k at level m."""
    out = [xs[0].flip()]
    for i in range(1, m):
        out.append(xs[m - i].flip().shifted(-1))
    return out


# ---------------------------------------------------------------------------
# virtual derivations


class VDerElt:
    """Virtual derivation from a finite-index subgroup of Z into K.

    Recorded by its level m (the derivation is defined on m*Z) and the
    value tau(t**m).  Raising the level multiplies the value by the
    geometric sum 1 + t**m + ... + t**(n-m).
    """

    __slots__ = ("level", "value")

    def __init__(self, level: int, value: F2LaurentPoly):
        if level < 1:
            raise ValueError("level must be >= 1")
        self.level = level
        self.value = value

    @classmethod
    def zero(cls) -> "VDerElt":
        return cls(1, _ZERO)

    def raise_to(self, n: int) -> "VDerElt":
        if n == self.level:
            return self
        if n % self.level:
            raise NotDivisible(f"{self.level} does not divide {n}")
        mult = F2LaurentPoly.geometric(self.level, n // self.level)
        return VDerElt(n, mult * self.value)

    def canonical(self) -> "VDerElt":
        if self.value.is_zero():
            return VDerElt(1, _ZERO)
        for d in _divisors(self.level):
            if d == self.level:
                return self
            mult = F2LaurentPoly.geometric(d, self.level // d)
            q = self.value.exact_div(mult)
            if q is not None:
                return VDerElt(d, q)
        return self

    def flip_conj(self) -> "VDerElt":
        """Conjugate by the orientation flip, at the same level."""
        return VDerElt(self.level, self.value.flip().shifted(self.level))

    def eval_at(self, n: int) -> F2LaurentPoly:
        """tau(t**n) for n a multiple of the level."""
        if n % self.level:
            raise NotDivisible(f"{self.level} does not divide {n}")
        q = n // self.level
        if q == 0:
            return _ZERO
        if q > 0:
            return F2LaurentPoly.geometric(self.level, q) * self.value
        pos = F2LaurentPoly.geometric(self.level, -q) * self.value
        return pos.shifted(n)

    def __eq__(self, other):
        return (
            isinstance(other, VDerElt)
            and self.level == other.level
            and self.value == other.value
        )

    def __hash__(self):
        return hash((self.level, self.value))

    def __repr__(self):
        return f"VDerElt({self.level}, {self.value.to_string()!r})"


def vder_raise(d: VDerElt, n: int) -> VDerElt:
    return d.raise_to(n)


# ---------------------------------------------------------------------------
# equivariant commensurations of K


def _min_u_power_poly(d: int, k: int) -> int:
    """Minimal D (mask, variable w) with d(u) dividing D(u**k); d odd."""
    uk = mask_mod(1 << k, d)
    pivots = {}
    cur = mask_mod(1, d)
    j = 0
    while True:
        r, combo = cur, 1 << j
        while r:
            lead = r.bit_length() - 1
            hit = pivots.get(lead)
            if hit is None:
                break
            r ^= hit[0]
            combo ^= hit[1]
        if r == 0:
            return combo
        pivots[r.bit_length() - 1] = (r, combo)
        j += 1
        cur = mask_mod(mask_mul(cur, uk), d)


def _mult_by_power_matrix(n: int, m: int) -> PolyMat:
    """Coordinate matrix of multiplication by t**m at level n (m < n, m | n)."""
    row0 = [0] * n
    row1 = [0] * n
    for j in range(n):
        if j + m < n:
            row0[j + m] |= 1 << j
        else:
            row1[j + m - n] |= 1 << j
    return PolyMat(n, (BitMat(n, row0), BitMat(n, row1)))


def _reversal_matrices(m: int) -> tuple[PolyMat, PolyMat]:
    """The basis reversal R and its inverse R**-1 = R(1/s) at level m."""
    b0 = [0] * m
    b0[0] = 1
    bneg = [0] * m
    for j in range(1, m):
        bneg[m - j] |= 1 << j
    if m == 1:
        ident = PolyMat.identity(1)
        return ident, ident
    r = PolyMat(m, (BitMat(m, bneg), BitMat(m, b0)), shift=-1)
    rinv = PolyMat(m, (BitMat(m, b0), BitMat(m, bneg)), shift=0)
    return r, rinv


class CommInftyElt:
    """Equivariant commensuration of K with an F2[t**m, t**-m]-linear
    representative, stored as num/den with num a matrix polynomial and
    den a scalar polynomial in s = t**m.

    Invariants: den has nonzero constant term and shares no factor with
    the gcd of the numerator entries.  Equality of canonical instances
    is equality of commensuration classes.
    """

    __slots__ = ("level", "num", "den")

    def __init__(self, level: int, num: PolyMat, den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        low = (den & -den).bit_length() - 1
        if low:
            den >>= low
            num = PolyMat(num.n, num.coeffs, num.shift - low)
        if den != 1 and not num.is_zero():
            g = mask_gcd(den, num.content_mask())
            if g > 1:
                den = mask_divmod(den, g)[0]
                gp = F2LaurentPoly._raw(g, 0)
                ents = [
                    [num.entry(i, j).exact_div(gp) for j in range(num.n)]
                    for i in range(num.n)
                ]
                num = PolyMat.from_entries(num.n, ents)
        self.level = level
        self.num = num
        self.den = den

    @classmethod
    def identity(cls, level: int = 1) -> "CommInftyElt":
        return cls(level, PolyMat.identity(level))

    @classmethod
    def from_entries(cls, level: int, entries) -> "CommInftyElt":
        """Build from an array of F2RatFun; raises SingularMatrix if singular."""
        mat = MatF2Rat(entries)
        if mat.nrows != level or mat.ncols != level:
            raise ValueError("matrix size must equal the level")
        if level and not mat.det():
            raise SingularMatrix("commensuration matrix must be invertible")
        den = 1
        for row in mat.rows:
            for x in row:
                den = mask_lcm(den, x.den)
        denp = F2LaurentPoly._raw(den, 0)
        ents = [
            [
                (x.num_poly() * denp).exact_div(x.den_poly())
                for x in row
            ]
            for row in mat.rows
        ]
        return cls(level, PolyMat.from_entries(level, ents), den)

    @classmethod
    def from_matrix(cls, mat: MatF2Rat) -> "CommInftyElt":
        return cls.from_entries(mat.nrows, mat.rows)

    @property
    def matrix(self) -> MatF2Rat:
        m = self.level
        return MatF2Rat._raw(
            (
                tuple(
                    F2RatFun(self.num.entry(i, j).mask, self.den, self.num.entry(i, j).shift)
                    for j in range(m)
                )
                for i in range(m)
            ),
            ncols=m,
        )

    def den_poly(self) -> F2LaurentPoly:
        return F2LaurentPoly._raw(self.den, 0)

    def raise_to(self, n: int) -> "CommInftyElt":
        m = self.level
        if n == m:
            return self
        if n % m:
            raise NotDivisible(f"{m} does not divide {n}")
        k = n // m
        if self.den == 1:
            dw = 1
            nn = self.num
        else:
            dw = _min_u_power_poly(self.den, k)
            e, rem = mask_divmod(mask_spread(dw, k), self.den)
            assert rem == 0
            nn = self.num.scalar_mul(e)
        if nn.is_zero():
            return CommInftyElt(n, PolyMat.zero(n), dw)
        coeffs = {}
        for ci, bm in enumerate(nn.coeffs):
            if bm.is_zero():
                continue
            c = nn.shift + ci
            for a2 in range(k):
                a = (c + a2) % k
                e = (c + a2 - a) // k
                rows = coeffs.get(e)
                if rows is None:
                    rows = [0] * n
                    coeffs[e] = rows
                off_r = m * a
                off_c = m * a2
                for j in range(m):
                    if bm.rows[j]:
                        rows[j + off_r] ^= bm.rows[j] << off_c
        lo = min(coeffs)
        hi = max(coeffs)
        seq = [
            BitMat(n, coeffs[e]) if e in coeffs else BitMat.zero(n)
            for e in range(lo, hi + 1)
        ]
        return CommInftyElt(n, PolyMat(n, seq, lo), dw)

    def canonical(self) -> "CommInftyElt":
        m = self.level
        for d in _divisors(m):
            if d == m:
                return self
            t_mat = _mult_by_power_matrix(m, d)
            if not self.num.commutes_with(t_mat):
                continue
            k = m // d
            ents = [[None] * d for _ in range(d)]
            for i in range(d):
                for j in range(d):
                    acc = _ZERO
                    for a in range(k):
                        p = self.num.entry(i + d * a, j)
                        if not p.is_zero():
                            acc = acc + p.spread(k).shifted(a)
                    ents[i][j] = acc
            return CommInftyElt(
                d, PolyMat.from_entries(d, ents), mask_spread(self.den, k)
            )
        return self

    def compose(self, other: "CommInftyElt") -> "CommInftyElt":
        if self.level != other.level:
            raise ValueError("levels must agree")
        return CommInftyElt(
            self.level, self.num * other.num, mask_mul(self.den, other.den)
        )

    def inverse(self) -> "CommInftyElt":
        return CommInftyElt.from_matrix(self.matrix.inv())

    def flip_conj(self) -> "CommInftyElt":
        m = self.level
        coeffs = tuple(reversed(self.num.coeffs))
        shift = -(self.num.shift + len(self.num.coeffs) - 1) if coeffs else 0
        sig = PolyMat(m, coeffs, shift)
        dr = mask_reverse(self.den) if self.den != 1 else 1
        extra = self.den.bit_length() - 1
        r, rinv = _reversal_matrices(m)
        num = r * sig * rinv
        return CommInftyElt(m, PolyMat(num.n, num.coeffs, num.shift + extra), dr)

    def apply(self, k: F2LaurentPoly):
        """Image of a K element, or None when it is outside the domain."""
        xs = k_to_coords(k, self.level)
        ys = self.num.apply(xs)
        if self.den == 1:
            return coords_to_k(ys, self.level)
        dp = self.den_poly()
        out = []
        for y in ys:
            q = y.exact_div(dp)
            if q is None:
                return None
            out.append(q)
        return coords_to_k(out, self.level)

    def __eq__(self, other):
        return (
            isinstance(other, CommInftyElt)
            and self.level == other.level
            and self.den == other.den
            and self.num == other.num
        )

    def __hash__(self):
        return hash((self.level, self.den, self.num))

    def __repr__(self):
        return f"CommInftyElt(level={self.level}, A={self.matrix.to_strings()})"


def comm_infty_raise(c: CommInftyElt, n: int) -> CommInftyElt:
    return c.raise_to(n)


# ---------------------------------------------------------------------------
# finite-index submodules of K


class SubmoduleBasis:
    """Finite-index F2[s, 1/s]-submodule of K at a level, by an HNF basis."""

    __slots__ = ("level", "rows")

    def __init__(self, level: int, rows):
        rows = tuple(tuple(row) for row in rows)
        if len(rows) != level or any(len(r) != level for r in rows):
            raise ValueError("basis must be square of size = level")
        if not hnf.is_hnf(rows):
            raise ValueError("basis is not in Hermite normal form")
        self.level = level
        self.rows = rows

    @classmethod
    def full(cls, level: int = 1) -> "SubmoduleBasis":
        return cls(level, hnf.row_echelon(
            [[_ONE if i == j else _ZERO for j in range(level)] for i in range(level)]
        )[0])

    @classmethod
    def from_generators(cls, level: int, gens) -> "SubmoduleBasis":
        return cls(level, hnf.module_from_rows(gens, level))

    @property
    def index_log2(self) -> int:
        return hnf.submodule_index(self.rows)

    def generators_as_k(self) -> list[F2LaurentPoly]:
        return [coords_to_k(row, self.level) for row in self.rows]

    def coords_of(self, k: F2LaurentPoly):
        """Basis coordinates of a K element, or None if outside."""
        return hnf.solve_membership(self.rows, k_to_coords(k, self.level))

    def contains(self, k: F2LaurentPoly) -> bool:
        return self.coords_of(k) is not None

    def flip(self) -> "SubmoduleBasis":
        gens = [flip_coords(row, self.level) for row in self.rows]
        return SubmoduleBasis.from_generators(self.level, gens)

    def __eq__(self, other):
        return (
            isinstance(other, SubmoduleBasis)
            and self.level == other.level
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.level, self.rows))

    def __repr__(self):
        return (
            f"SubmoduleBasis(level={self.level}, "
            f"H={[[x.to_string() for x in r] for r in self.rows]})"
        )

    def to_json(self):
        return {
            "level": self.level,
            "H": [[x.to_string("s") for x in r] for r in self.rows],
        }

    @classmethod
    def from_json(cls, obj) -> "SubmoduleBasis":
        rows = [
            [F2LaurentPoly.from_string(x) for x in r] for r in obj["H"]
        ]
        return cls(int(obj["level"]), rows)


# ---------------------------------------------------------------------------
# commensurations of the lamplighter group


class LampComm:
    """Canonical commensuration (der, lin, flip) of the lamplighter group."""

    __slots__ = ("der", "lin", "flip")

    def __init__(self, der: VDerElt, lin: CommInftyElt, flip: bool):
        if der.level != lin.level:
            raise ValueError("components must share a level; use make()")
        self.der = der
        self.lin = lin
        self.flip = bool(flip)

    @classmethod
    def make(cls, der: VDerElt, lin: CommInftyElt, flip: bool) -> "LampComm":
        dc = der.canonical()
        lc = lin.canonical()
        level = math.lcm(dc.level, lc.level)
        return cls(dc.raise_to(level), lc.raise_to(level), flip)

    @classmethod
    def identity(cls) -> "LampComm":
        return cls(VDerElt.zero(), CommInftyElt.identity(1), False)

    @classmethod
    def flip_class(cls) -> "LampComm":
        return cls(VDerElt.zero(), CommInftyElt.identity(1), True)

    @property
    def level(self) -> int:
        return self.der.level

    def is_identity(self) -> bool:
        return self == LampComm.identity()

    def __eq__(self, other):
        return (
            isinstance(other, LampComm)
            and self.flip == other.flip
            and self.der == other.der
            and self.lin == other.lin
        )

    def __hash__(self):
        return hash((self.der, self.lin, self.flip))

    def __repr__(self):
        return (
            f"LampComm(level={self.level}, der={self.der.value.to_string()!r}, "
            f"A={self.lin.matrix.to_strings()}, flip={self.flip})"
        )

    def to_json(self):
        return {
            "level": self.level,
            "der": self.der.value.to_string(),
            "A": [
                [x.to_string("s") for x in row] for row in self.lin.matrix.rows
            ],
            "flip": self.flip,
        }

    @classmethod
    def from_json(cls, obj) -> "LampComm":
        level = int(obj["level"])
        der = VDerElt(level, F2LaurentPoly.from_string(obj["der"]))
        lin = CommInftyElt.from_entries(
            level,
            [[F2RatFun.from_string(x) for x in row] for row in obj["A"]],
        )
        return cls.make(der, lin, bool(obj["flip"]))


def _apply_lin_to_vder(lin: CommInftyElt, value: F2LaurentPoly):
    """Image of a derivation value under an equivariant commensuration.

    The image need not lie in K; the result is the least j >= 1 such
    that lin(R_j * value) does, together with that element, where R_j
    is the level-raising multiplier 1 + s + ... + s**(j-1) with
    s = t**level.
    """
    m = lin.level
    xs = k_to_coords(value, m)
    ys = lin.num.apply(xs)
    den = lin.den
    dreq = 1
    if den != 1:
        for y in ys:
            if y.is_zero():
                continue
            g = mask_gcd(den, y.mask)
            need = mask_divmod(den, g)[0]
            dreq = mask_lcm(dreq, need)
    if dreq == 1:
        j = 1
    else:
        j = 1
        r = mask_mod(1, dreq)
        spow = mask_mod(2, dreq)
        cap = 2 << (dreq.bit_length() + 1)
        while r:
            r ^= spow
            spow = mask_mod(mask_mul(spow, 2), dreq)
            j += 1
            if j > cap:
                raise RuntimeError("level search failed to terminate")
    mult = F2LaurentPoly.geometric(1, j)
    dp = lin.den_poly()
    out = []
    for y in ys:
        q = (mult * y).exact_div(dp)
        assert q is not None
        out.append(q)
    return j, coords_to_k(out, m)


def comm_compose(c1: LampComm, c2: LampComm) -> LampComm:
    """The class of c1 after c2 (right-to-left composition)."""
    level = math.lcm(c1.level, c2.level)
    d1 = c1.der.raise_to(level)
    a1 = c1.lin.raise_to(level)
    d2 = c2.der.raise_to(level)
    a2 = c2.lin.raise_to(level)
    if c1.flip:
        d2 = d2.flip_conj()
        a2 = a2.flip_conj()
    j, applied = _apply_lin_to_vder(a1, d2.value)
    lin = a1.compose(a2)
    if j > 1:
        level_j = j * level
        lin = lin.raise_to(level_j)
        v1 = d1.raise_to(level_j).value
        level = level_j
    else:
        v1 = d1.value
    return LampComm.make(
        VDerElt(level, v1 + applied), lin, c1.flip != c2.flip
    )


def comm_invert(c: LampComm) -> LampComm:
    a = c.lin.flip_conj() if c.flip else c.lin
    beta = a.inverse()
    v = c.der.flip_conj().value if c.flip else c.der.value
    j, applied = _apply_lin_to_vder(beta, v)
    level = c.level
    if j > 1:
        level *= j
        beta = beta.raise_to(level)
    return LampComm.make(VDerElt(level, applied), beta, c.flip)


def comm_apply(c: LampComm, g: LampElement) -> LampElement:
    """Image of a group element; raises OutOfDomain off the domain."""
    level = c.level
    if g.n % level:
        raise OutOfDomain(f"exponent {g.n} is not a multiple of the level {level}")
    kk = g.k.flip() if c.flip else g.k
    img = c.lin.apply(kk)
    if img is None:
        raise OutOfDomain("lamp configuration is outside the domain")
    n2 = -g.n if c.flip else g.n
    return LampElement(img + c.der.eval_at(n2), n2)


def comm_domain(c: LampComm):
    """Largest domain on which the class applies exactly.

    Returns (D, L): the HNF basis of the submodule D of K and the level
    L such that c applies on {(k, l*L) : k in D, l in Z} and nowhere
    else.
    """
    level = c.level
    dp = c.lin.den_poly()
    num = c.lin.num
    stacked = []
    for i in range(level):
        stacked.append([num.entry(r, i) for r in range(level)])
    for i in range(level):
        stacked.append([dp if r == i else _ZERO for r in range(level)])
    gens = [y[:level] for y in hnf.left_kernel(stacked)]
    basis = SubmoduleBasis.from_generators(level, gens)
    if c.flip:
        basis = basis.flip()
    return basis, level


def theta_sign(c: LampComm) -> int:
    """Image in {+1, -1} of the induced commensuration of Z."""
    return -1 if c.flip else 1


def diagonal_embed(n: int, rows) -> LampComm:
    """Block-diagonal action of an invertible F2 matrix on consecutive
    n-blocks of lamps, as a level-n commensuration."""
    bm = BitMat.from_lists(rows) if not isinstance(rows, BitMat) else rows
    if bm.n != n:
        raise ValueError("matrix size mismatch")
    if not bm.is_invertible():
        raise SingularMatrix("matrix is not invertible over F2")
    return LampComm.make(
        VDerElt.zero(), CommInftyElt(n, PolyMat.constant(bm)), False
    )


def comm_from_partial(
    level: int,
    domain: SubmoduleBasis,
    gen_images,
    t_image: LampElement,
    window: int | None = None,
) -> LampComm:
    """Reconstruct the canonical class from images of the domain
    generators and of t**level.

    The generator images must be torsion, their span must be full, and
    the image of t**level must project to +-level in the Z-direction;
    the defining relations are spot-checked on a window of conjugates.
    """
    if domain.level != level:
        raise ValueError("domain level mismatch")
    gen_images = list(gen_images)
    if len(gen_images) != level:
        raise ValueError(f"expected {level} generator images")
    if abs(t_image.n) != level:
        raise ExponentMismatch(
            f"image of t**{level} must have Z-part +-{level}, got {t_image.n}"
        )
    eps = 1 if t_image.n > 0 else -1
    for img in gen_images:
        if img.n != 0:
            raise NotAHomomorphism("image of a torsion generator must be torsion")
    gens = domain.generators_as_k()
    cols_in = [
        k_to_coords(g.flip() if eps < 0 else g, level) for g in gens
    ]
    cols_out = [k_to_coords(img.k, level) for img in gen_images]
    to_rat = lambda polys: [F2RatFun.from_poly(p) for p in polys]
    x_mat = MatF2Rat(list(map(to_rat, cols_in))).transpose()
    h_mat = MatF2Rat(list(map(to_rat, cols_out))).transpose()
    try:
        a_mat = h_mat * x_mat.inv()
        lin = CommInftyElt.from_matrix(a_mat)
    except SingularMatrix:
        raise NotAHomomorphism("generator images do not span a finite-index submodule")
    value = t_image.k if eps > 0 else t_image.k.shifted(level)
    c = LampComm.make(VDerElt(level, value), lin, eps < 0)
    if window is None:
        maxdeg = max(
            (g.max_exp - g.min_exp for g in gens if not g.is_zero()), default=0
        )
        window = max(2, window_width(level, maxdeg) // (4 * level))
    w = window
    t_given = t_image
    for g, img in zip(gens, gen_images):
        for j in range(-w, w + 1):
            got = comm_apply(c, LampElement(g.shifted(j * level), 0))
            want = (t_given ** j) * img * (t_given ** (-j))
            if got != want:
                raise NotAHomomorphism(
                    "generator images violate the conjugation relations"
                )
    if comm_apply(c, LampElement(_ZERO, level)) != t_image:
        raise NotAHomomorphism("image of the shift is inconsistent")
    return c


# ---------------------------------------------------------------------------
# the quotient-dimension computation


def _f2_rank_of_polys(polys) -> int:
    live = [p for p in polys if not p.is_zero()]
    if not live:
        return 0
    base = min(p.shift for p in live)
    return f2_rank([p.mask << (p.shift - base) for p in live])


def _window_quotient_dim(k1: SubmoduleBasis, m: int, width: int) -> int:
    m1 = k1.level
    q = m // m1
    j_max = max(1, width // m1 + 1)
    gens = k1.generators_as_k()
    mult = _ONE + F2LaurentPoly.t_power(m)
    rows_top = [
        g.shifted(j * m1) for g in gens for j in range(-j_max, j_max + 1)
    ]
    rows_sub = [
        (mult * g).shifted(j * m1)
        for g in gens
        for j in range(-j_max, j_max - q + 1)
    ]
    return _f2_rank_of_polys(rows_top) - _f2_rank_of_polys(rows_sub)


def quotient_dim(k1: SubmoduleBasis, m: int, window: int | None = None) -> int:
    """F2-dimension of K1 / (1 + t**m) K1 for an invariant submodule K1.

    Computed by exact linear algebra on an exponent window, re-run at
    doubled width as a stability check.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m % k1.level:
        raise NotDivisible(
            f"submodule level {k1.level} must divide the commutator exponent {m}"
        )
    maxdeg = 0
    for row in k1.rows:
        for x in row:
            if not x.is_zero():
                maxdeg = max(maxdeg, x.max_exp * k1.level + k1.level - 1)
    width = window if window is not None else window_width(m, maxdeg)
    d1 = _window_quotient_dim(k1, m, width)
    d2 = _window_quotient_dim(k1, m, 2 * width)
    if d1 != d2:
        raise WindowUnstable(
            f"window width {width} is not stable; widen COMMLAB_WINDOW"
        )
    return d1


# ---------------------------------------------------------------------------
# pseudo-random sampling (used by the test suite and the demos)


def random_element(rng, max_exp: int = 8) -> LampElement:
    support = [e for e in range(-max_exp, max_exp + 1) if rng.random() < 0.25]
    return LampElement(F2LaurentPoly(support), rng.randrange(-3, 4))


def random_submodule(rng, max_level: int = 3, max_index_log: int = 6) -> SubmoduleBasis:
    level = rng.randrange(1, max_level + 1)
    budget = rng.randrange(0, max_index_log + 1)
    rows = []
    for i in range(level):
        d = rng.randrange(0, budget + 1)
        budget -= d
        diag_mask = 1
        if d:
            diag_mask |= 1 << d
            for e in range(1, d):
                if rng.random() < 0.5:
                    diag_mask |= 1 << e
        row = [_ZERO] * level
        row[i] = F2LaurentPoly._raw(diag_mask, 0)
        for j in range(i + 1, level):
            if rng.random() < 0.3:
                row[j] = F2LaurentPoly._raw(rng.randrange(1, 4), 0)
        rows.append(row)
    return SubmoduleBasis.from_generators(level, rows)


def _random_ratfun(rng, max_deg: int = 2) -> F2RatFun:
    num = rng.randrange(1, 1 << (max_deg + 1))
    den = rng.randrange(0, 1 << max_deg) * 2 + 1
    return F2RatFun(num, den, rng.randrange(-1, 2))


def random_comm(rng, max_level: int = 6, max_deg: int = 8) -> LampComm:
    """Pseudo-random canonical commensuration within a degree envelope."""
    level = rng.randrange(1, max_level + 1)
    ident = MatF2Rat.identity(level)
    mat = ident
    for _ in range(rng.randrange(1, 4)):
        kind = rng.randrange(3)
        rows = [list(r) for r in ident.rows]
        if kind == 0 and level > 1:
            i, j = rng.sample(range(level), 2)
            rows[i][j] = _random_ratfun(rng)
        elif kind == 1:
            i = rng.randrange(level)
            rows[i][i] = F2RatFun.t_power(rng.choice((-1, 1)))
        else:
            perm = list(range(level))
            rng.shuffle(perm)
            rows = [
                [ident.rows[perm[i]][j] for j in range(level)]
                for i in range(level)
            ]
        mat = mat * MatF2Rat(rows)
    support = [e for e in range(-max_deg, max_deg + 1) if rng.random() < 0.2]
    der = VDerElt(level, F2LaurentPoly(support))
    return LampComm.make(der, CommInftyElt.from_matrix(mat), rng.random() < 0.5)
