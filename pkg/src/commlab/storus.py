"""S-arithmetic ranks of rational tori built from quadratic factors.

A torus here is a product of split factors Gm, norm-one tori of real or
imaginary quadratic fields, and their full restrictions of scalars,
each tagged by a squarefree discriminant.  The group of S-integer
points is, up to finite index, free abelian of rank

    N = rank_R - rank_Q + sum over p in S of rank_Qp,

and each local rank reduces to deciding whether the discriminant is a
square in the local field.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    ExceedsFactorBound,
    FiniteOrder,
    InvalidTorusSpec,
    NotPrime,
    ReducibleCharPoly,
    ZeroInput,
)

_TRIAL_BOUND = 10**6


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    # deterministic Miller-Rabin for 64-bit-ish inputs
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def squarefree_part(n: int) -> int:
    """Largest squarefree divisor with the same sign.

    Factors by trial division up to 10**6; inputs whose unfactored part
    is neither 1 nor a perfect square are rejected.
    """
    if n == 0:
        return 0
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    p = 2
    while p * p <= n and p <= _TRIAL_BOUND:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e % 2:
                out *= p
        p += 1 if p == 2 else 2
    if n > 1:
        if n <= _TRIAL_BOUND * _TRIAL_BOUND and is_prime(n):
            out *= n
        else:
            r = _isqrt(n)
            if r * r == n:
                pass  # even multiplicities throughout
            else:
                raise ExceedsFactorBound(
                    f"cannot certify the squarefree part of {n}"
                )
    return sign * out


def _isqrt(n: int) -> int:
    import math

    return math.isqrt(n)


def is_square_qp(x, p: int) -> bool:
    """Whether x in Q* is a square in the p-adic field Q_p."""
    x = Fraction(x)
    if x == 0:
        raise ZeroInput("0 has no meaningful p-adic square class here")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    if v % 2:
        return False
    # unit part u = num/den mod suitable power of p
    if p == 2:
        u = num * pow(den, -1, 8) % 8
        return u == 1
    u = num * pow(den, -1, p) % p
    return pow(u, (p - 1) // 2, p) == 1


@dataclass(frozen=True)
class TorusFactor:
    kind: str  # "Gm" | "NormOne" | "RestScalars"
    d: int | None = None

    def __post_init__(self):
        if self.kind == "Gm":
            if self.d is not None:
                raise InvalidTorusSpec("Gm carries no discriminant")
            return
        if self.kind not in ("NormOne", "RestScalars"):
            raise InvalidTorusSpec(f"unknown torus factor {self.kind!r}")
        if self.d in (0, 1) or self.d is None:
            raise InvalidTorusSpec("discriminant must be squarefree and not 0 or 1")
        if squarefree_part(self.d) != self.d:
            raise InvalidTorusSpec(f"discriminant {self.d} is not squarefree")


@dataclass(frozen=True)
class TorusSpec:
    """Product of Gm / norm-one / restriction-of-scalars quadratic factors."""

    factors: tuple[TorusFactor, ...] = field(default_factory=tuple)

    @classmethod
    def gm(cls) -> "TorusSpec":
        return cls((TorusFactor("Gm"),))

    @classmethod
    def norm_one(cls, d: int) -> "TorusSpec":
        return cls((TorusFactor("NormOne", d),))

    @classmethod
    def rest_scalars(cls, d: int) -> "TorusSpec":
        return cls((TorusFactor("RestScalars", d),))

    def __mul__(self, other: "TorusSpec") -> "TorusSpec":
        return TorusSpec(self.factors + other.factors)

    def to_json(self):
        return [
            {"kind": f.kind} if f.d is None else {"kind": f.kind, "d": f.d}
            for f in self.factors
        ]

    @classmethod
    def from_json(cls, obj) -> "TorusSpec":
        return cls(tuple(TorusFactor(f["kind"], f.get("d")) for f in obj))


@dataclass(frozen=True)
class RankReport:
    rank_R: int
    rank_Q: int
    rank_Qp: dict
    N: int

    def __post_init__(self):
        if self.N != self.rank_R - self.rank_Q + sum(self.rank_Qp.values()):
            raise InvalidTorusSpec("rank bookkeeping is inconsistent")
        if self.N < 0:
            raise InvalidTorusSpec("the free rank cannot be negative")

    def to_json(self):
        return {
            "rank_R": self.rank_R,
            "rank_Q": self.rank_Q,
            "rank_Qp": {str(p): r for p, r in sorted(self.rank_Qp.items())},
            "N": self.N,
        }


def _sqrt_in_field(d: int, fieldtag) -> bool:
    if fieldtag == "R":
        return d > 0
    if fieldtag == "Q":
        return False  # d squarefree, not 1
    p = fieldtag[1]
    return is_square_qp(d, p)


def rank_over(spec: TorusSpec, fieldtag) -> int:
    """Rank of the torus over R, Q, or Q_p.

    ``fieldtag`` is "R", "Q", or ("Qp", p).
    """
    if not isinstance(spec, TorusSpec):
        raise InvalidTorusSpec("expected a TorusSpec")
    total = 0
    for f in spec.factors:
        if f.kind == "Gm":
            total += 1
        elif f.kind == "NormOne":
            total += 1 if _sqrt_in_field(f.d, fieldtag) else 0
        else:  # RestScalars
            total += 2 if _sqrt_in_field(f.d, fieldtag) else 1
    return total


def s_rank(spec: TorusSpec, primes) -> RankReport:
    """Free rank of the S-integer points, with the per-field breakdown."""
    primes = sorted(set(primes))
    for p in primes:
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
    r_r = rank_over(spec, "R")
    r_q = rank_over(spec, "Q")
    r_p = {p: rank_over(spec, ("Qp", p)) for p in primes}
    n = r_r - r_q + sum(r_p.values())
    return RankReport(r_r, r_q, r_p, n)


def torus_from_matrix2(mat) -> TorusSpec:
    """Zariski closure type of the cyclic group generated by a 2x2
    integer matrix with determinant +-1 and irrational eigenvalues.

    det = 1 gives the norm-one torus of the squarefree part of
    trace**2 - 4.  For det = -1 the closure's identity component is the
    norm-one torus of the square of the matrix, whose discriminant has
    squarefree part equal to that of trace**2 + 4.
    """
    (a, b), (c, d) = mat
    det = a * d - b * c
    tr = a + d
    if det not in (1, -1):
        raise InvalidTorusSpec(f"determinant must be +-1, got {det}")
    disc = tr * tr - 4 * det
    root = _isqrt(abs(disc))
    if disc >= 0 and root * root == disc:
        raise ReducibleCharPoly(
            f"characteristic polynomial splits over Q (disc = {disc})"
        )
    if det == 1 and tr in (-1, 0, 1):
        # x^2 -+ x + 1 and x^2 + 1 are cyclotomic
        raise FiniteOrder(f"matrix has finite order (trace {tr}, det 1)")
    if det == 1:
        return TorusSpec.norm_one(squarefree_part(disc))
    return TorusSpec.norm_one(squarefree_part(tr * tr + 4))


def is_square_qp_bruteforce(x, p: int, max_exp: int = 6) -> bool:
    """Search oracle: membership of x in the squares modulo p**k.

    Uses k = max_exp for small p and the smallest still-conclusive k
    for larger p (valuations of the inputs here are 0 or 1, for which
    k = 2 decides odd p and k = 6 decides p = 2).
    """
    x = Fraction(x)
    if x == 0:
        raise ZeroInput("0 is excluded")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    k = max_exp if p <= 13 else min(max_exp, 2)
    mod = p**k
    num, den = x.numerator, x.denominator
    target = num * pow(den, -1, mod) % mod if den % p else None
    if target is None:
        # denominator divisible by p: scale by p**2 until integral
        v = 0
        while den % p == 0:
            den //= p
            v += 1
        if v % 2:
            return False
        target = num * pow(den, -1, mod) % mod
    squares = _square_set(mod)
    return target in squares


_SQUARE_CACHE: dict[int, frozenset] = {}


def _square_set(mod: int) -> frozenset:
    cached = _SQUARE_CACHE.get(mod)
    if cached is None:
        cached = frozenset((y * y) % mod for y in range(mod // 2 + 1))
        _SQUARE_CACHE[mod] = cached
    return cached
