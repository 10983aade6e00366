"""Commensurators of reduced solvable S-arithmetic groups.

Three computational pieces live here:

* the solvable Baumslag-Solitar groups BS(1, n), modeled as affine maps
  x -> n**a * x + b with b an n-integer, together with their
  commensurations q |x q* acting by affine conjugation on explicit
  finite-index subgroups;

* an exact solver for systems (T_i - 1) x = v_i arising from inner
  derivations of commuting torus actions with no common fixed vector;

* the iterated semidirect-product group law on block descriptions
  (central Hom block, GL block, Hom block, reduced-part automorphism)
  with the GL and reduced parts acting by pre- and post-composition.

Conventions for the block group law, fixed here once: elements multiply
right-to-left, a semidirect pair is written (normal part, acting part)
with (b1, a1)(b2, a2) = (b1 + a1 . b2, a1 a2), and an acting part
twists a Hom block by postcomposition with its action on the target and
precomposition with the inverse of its action on the source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BaseMismatch,
    DegenerateAction,
    DimensionMismatch,
    IncompatibleCocycle,
    OutOfDomain,
    UnknownInstantiation,
)
from .matrices import MatQ


# ---------------------------------------------------------------------------
# affine maps and Baumslag-Solitar elements


@dataclass(frozen=True)
class AffineMap:
    """x -> r*x + q with r != 0; the group Q x| Q* under composition."""

    r: Fraction
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "q", Fraction(self.q))
        if self.r == 0:
            raise ValueError("scale must be nonzero")

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(Fraction(1), Fraction(0))

    def __call__(self, x) -> Fraction:
        return self.r * Fraction(x) + self.q

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other."""
        return AffineMap(self.r * other.r, self.r * other.q + self.q)

    def inverse(self) -> "AffineMap":
        return AffineMap(1 / self.r, -self.q / self.r)


def _n_coprime_denominator(x: Fraction, n: int) -> int:
    d = x.denominator
    g = math.gcd(d, n)
    while g > 1:
        while d % g == 0:
            d //= g
        g = math.gcd(d, n)
    return d


def _is_n_integral(x: Fraction, n: int) -> bool:
    return _n_coprime_denominator(x, n) == 1


@dataclass(frozen=True)
class BSElement:
    """Element of BS(1, n) as the affine map x -> n**a * x + b."""

    n: int
    a: int
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "b", Fraction(self.b))
        if self.n < 2:
            raise ValueError("base must be >= 2")
        if not _is_n_integral(self.b, self.n):
            raise ValueError(f"translation {self.b} is not a {self.n}-integer")

    @classmethod
    def identity(cls, n: int) -> "BSElement":
        return cls(n, 0, Fraction(0))

    def inverse(self) -> "BSElement":
        s = Fraction(self.n) ** (-self.a)
        return BSElement(self.n, -self.a, -s * self.b)

    def to_json(self):
        return {"n": self.n, "a": self.a, "b": str(self.b)}

    @classmethod
    def from_json(cls, obj) -> "BSElement":
        return cls(int(obj["n"]), int(obj["a"]), Fraction(obj["b"]))


def bs_mul(g: BSElement, h: BSElement) -> BSElement:
    if g.n != h.n:
        raise BaseMismatch(f"bases {g.n} and {h.n} differ")
    return BSElement(g.n, g.a + h.a, g.b + Fraction(g.n) ** g.a * h.b)


def bs_inv(g: BSElement) -> BSElement:
    return g.inverse()


def bs_comm_domain(c: AffineMap, n: int) -> tuple[int, int]:
    """Congruence parameters (K, D) of the conjugation commensuration.

    D clears the n-coprime denominator parts of the scale and the
    translation of c; K is the multiplicative order of n modulo the
    n-coprime denominator of the translation.  Conjugation by c maps
    every element with a in K*Z and b in D*Z[1/n] back into BS(1, n).
    """
    d_r = _n_coprime_denominator(c.r, n)
    d_q = _n_coprime_denominator(c.q, n)
    d = d_r * d_q // math.gcd(d_r, d_q)
    if d_q == 1:
        k = 1
    else:
        k = 1
        acc = n % d_q
        while acc != 1:
            acc = acc * n % d_q
            k += 1
    return k, d


def bs_comm_apply(c: AffineMap, g: BSElement) -> BSElement:
    """Conjugate c . g . c**-1, defined on the congruence subgroup."""
    k, d = bs_comm_domain(c, g.n)
    if g.a % k or not _is_n_integral(g.b / d, g.n):
        raise OutOfDomain(
            f"element outside the congruence subgroup (K={k}, D={d})"
        )
    scale = Fraction(g.n) ** g.a
    return BSElement(g.n, g.a, c.r * g.b + c.q * (1 - scale))


# ---------------------------------------------------------------------------
# inner derivations of commuting torus actions


def solve_inner_derivation(ts, vs) -> MatQ:
    """Exact x with (T_i - 1) x = v_i for all i.

    The T_i must commute, have no common nonzero fixed vector, and the
    v_i must satisfy (T_j - 1) v_i = (T_i - 1) v_j; then x exists and is
    unique.
    """
    ts = [t if isinstance(t, MatQ) else MatQ(t) for t in ts]
    vs = [v if isinstance(v, MatQ) else MatQ(v) for v in vs]
    if not ts or len(ts) != len(vs):
        raise ValueError("need matching nonempty lists of matrices and vectors")
    dim = ts[0].nrows
    for t in ts:
        if not t.is_square() or t.nrows != dim:
            raise ValueError("all matrices must be square of one size")
    for v in vs:
        if v.nrows != dim or v.ncols != 1:
            raise ValueError("the right-hand sides must be column vectors")
    for i, ti in enumerate(ts):
        for tj in ts[i + 1:]:
            if ti * tj != tj * ti:
                raise IncompatibleCocycle("the matrices do not commute")
    ident = MatQ.identity(dim)
    diffs = [t - ident for t in ts]
    for i in range(len(ts)):
        for j in range(i + 1, len(ts)):
            if diffs[j] * vs[i] != diffs[i] * vs[j]:
                raise IncompatibleCocycle(
                    "right-hand sides fail the commuting-cocycle identity"
                )
    stacked = MatQ._raw(
        (row for d in diffs for row in d.rows), ncols=dim
    )
    if stacked.nullspace():
        raise DegenerateAction("the actions share a nonzero fixed vector")
    rhs = MatQ._raw((row for v in vs for row in v.rows), ncols=1)
    x = stacked.solve(rhs)
    if x is None:
        raise IncompatibleCocycle("the stacked linear system is inconsistent")
    return x


# ---------------------------------------------------------------------------
# the iterated semidirect product of block descriptions


class ReducedAut:
    """Opaque reduced-part automorphism interface.

    An instantiation supplies a group of elements together with the
    three matrix actions entering the block group law: on the torus
    coordinates Q**N1, on the center Q**dZ1 of the reduced group, and
    on the central unipotent part Q**dZ of the ambient group.
    """

    name = "abstract"

    def identity(self):
        raise NotImplementedError

    def compose(self, a, b):
        raise NotImplementedError

    def invert(self, a):
        raise NotImplementedError

    def torus_matrix(self, a, n1: int) -> MatQ:
        return MatQ.identity(n1)

    def center_matrix(self, a, dz1: int) -> MatQ:
        return MatQ.identity(dz1)

    def central_u_matrix(self, a, dz: int) -> MatQ:
        return MatQ.identity(dz)


class TrivialReduced(ReducedAut):
    """Reduced part with only the identity automorphism."""

    name = "trivial"

    def identity(self):
        return None

    def compose(self, a, b):
        return None

    def invert(self, a):
        return None


class BSReduced(ReducedAut):
    """Reduced part Q x| Q*, the commensurations of a solvable
    Baumslag-Solitar group; it fixes the exponent direction, so all
    three matrix actions are trivial."""

    name = "bs"

    def identity(self):
        return AffineMap.identity()

    def compose(self, a, b):
        return a.compose(b)

    def invert(self, a):
        return a.inverse()


_REDUCED_TAGS = {"trivial": TrivialReduced, "bs": BSReduced}


@dataclass(frozen=True)
class CommSpace:
    """Dimension data (N0, N1, dZ, dZ1) and the reduced-part instantiation."""

    n0: int
    n1: int
    dz: int
    dz1: int
    red: ReducedAut

    def identity_desc(self) -> "CommDesc":
        return CommDesc(
            self,
            MatQ.zeros(self.dz, self.n0),
            MatQ.identity(self.n0),
            MatQ.zeros(self.n0, self.n1),
            MatQ.zeros(self.dz1, self.n1),
            self.red.identity(),
        )

    def __eq__(self, other):
        return (
            isinstance(other, CommSpace)
            and (self.n0, self.n1, self.dz, self.dz1) ==
            (other.n0, other.n1, other.dz, other.dz1)
            and type(self.red) is type(other.red)
        )

    def __hash__(self):
        return hash((self.n0, self.n1, self.dz, self.dz1, type(self.red)))


@dataclass(frozen=True)
class CommDesc:
    """Element of the iterated semidirect product: a central Hom block
    dZ x N0, an invertible GL block N0 x N0, a Hom block N0 x N1, a Hom
    block dZ1 x N1, and a reduced-part element."""

    space: CommSpace
    h_central: MatQ
    p: MatQ
    h_10: MatQ
    h_1z: MatQ
    red: object

    def __post_init__(self):
        s = self.space
        shapes = (
            (self.h_central, s.dz, s.n0),
            (self.p, s.n0, s.n0),
            (self.h_10, s.n0, s.n1),
            (self.h_1z, s.dz1, s.n1),
        )
        for mat, r, c in shapes:
            if mat.nrows != r or mat.ncols != c:
                raise DimensionMismatch(
                    f"block of shape {mat.nrows}x{mat.ncols}, expected {r}x{c}"
                )


def comm_desc_mul(x: CommDesc, y: CommDesc) -> CommDesc:
    """Right-to-left product in the iterated semidirect product."""
    s = x.space
    if s != y.space:
        raise DimensionMismatch("descriptions live in different products")
    red = s.red
    t_inv = red.torus_matrix(x.red, s.n1).inv()
    z1 = red.center_matrix(x.red, s.dz1)
    zc = red.central_u_matrix(x.red, s.dz)
    p_inv = x.p.inv()
    return CommDesc(
        s,
        x.h_central + zc * y.h_central * p_inv,
        x.p * y.p,
        x.h_10 + x.p * y.h_10 * t_inv,
        x.h_1z + z1 * y.h_1z * t_inv,
        red.compose(x.red, y.red),
    )


def comm_desc_inv(x: CommDesc) -> CommDesc:
    s = x.space
    red = s.red
    r_inv = red.invert(x.red)
    t_mat = red.torus_matrix(x.red, s.n1)
    z1 = red.center_matrix(x.red, s.dz1)
    zc = red.central_u_matrix(x.red, s.dz)
    p_inv = x.p.inv()
    return CommDesc(
        s,
        -(zc.inv() * x.h_central * x.p),
        p_inv,
        -(p_inv * x.h_10 * t_mat),
        -(z1.inv() * x.h_1z * t_mat),
        r_inv,
    )


@dataclass(frozen=True)
class StructureReport:
    """Shape of the commensurator of a reduced solvable group."""

    n: int
    dim_z: int
    iso: str
    space: CommSpace

    def to_json(self):
        return {"N": self.n, "dim_Z": self.dim_z, "iso": self.iso}


def reduced_comm_structure(n: int, dim_z: int, aut_desc: str) -> StructureReport:
    """Commensurator shape Hom(Q**N, Z(G)(Q)) x| Aut for a reduced group,
    with a concrete block instantiation for the named reduced part."""
    if n < 0 or dim_z < 0:
        raise ValueError("dimensions must be nonnegative")
    cls = _REDUCED_TAGS.get(aut_desc)
    if cls is None:
        raise UnknownInstantiation(f"unknown reduced part {aut_desc!r}")
    red = cls()
    space = CommSpace(0, n, 0, dim_z, red)
    aut_name = "(Q |x Q*)" if aut_desc == "bs" else "Aut(triv)"
    iso = f"Hom(Q^{n}, Q^{dim_z}) x| {aut_name}"
    if dim_z == 0:
        iso = f"Hom(Q^{n}, 0) x| {aut_name} = {aut_name}"
    return StructureReport(n, dim_z, iso, space)
