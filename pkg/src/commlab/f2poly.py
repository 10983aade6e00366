"""Laurent polynomials over the two-element field.

A polynomial here is determined by its support: the finite set of
integer exponents carrying coefficient 1.  Addition is symmetric
difference of supports and multiplication is carry-less convolution.
Internally the support is packed into a Python int (bit ``i`` of
``mask`` is the coefficient of ``t**(shift + i)``), which keeps ring
operations at machine speed; the public interface speaks exponent sets.

The mask helpers at the top operate on ordinary polynomials (mask bit 0
is the constant term) and are shared with the rational-function and
normal-form layers.
"""

from __future__ import annotations

import re


def mask_deg(a: int) -> int:
    """Degree of a nonzero poly mask."""
    return a.bit_length() - 1


def mask_mul(a: int, b: int) -> int:
    """Carry-less product of two poly masks."""
    if a == 0 or b == 0:
        return 0
    if a.bit_count() > b.bit_count():
        a, b = b, a
    acc = 0
    while a:
        low = a & -a
        acc ^= b << (low.bit_length() - 1)
        a &= a - 1
    return acc


def mask_divmod(a: int, b: int) -> tuple[int, int]:
    """Euclidean division a = q*b + r with deg r < deg b.  Requires b != 0."""
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    db = b.bit_length() - 1
    q = 0
    while a and a.bit_length() - 1 >= db:
        k = a.bit_length() - 1 - db
        a ^= b << k
        q |= 1 << k
    return q, a


def mask_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, mask_divmod(a, b)[1]
    return a


def mask_lcm(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return mask_mul(b, mask_divmod(a, mask_gcd(a, b))[0])


def mask_mod(a: int, b: int) -> int:
    return mask_divmod(a, b)[1]


def mask_spread(a: int, k: int) -> int:
    """Substitute x -> x**k into a poly mask (k >= 1)."""
    if k == 1:
        return a
    acc = 0
    while a:
        low = a & -a
        acc |= 1 << (k * (low.bit_length() - 1))
        a &= a - 1
    return acc


def mask_reverse(a: int) -> int:
    """Reverse the coefficients of a nonzero poly mask (x -> 1/x up to a shift)."""
    return int(bin(a)[:1:-1], 2)


_TERM_RE = re.compile(r"^(1|[ts](\^(-?\d+))?)$")


class F2LaurentPoly:
    """Finitely supported element of F2[t, 1/t], i.e. a sum of distinct powers of t.

    Instances are immutable and hashable; equality is equality of
    supports.  The zero polynomial has empty support.
    """

    __slots__ = ("mask", "shift")

    def __init__(self, support=()):
        mask = 0
        lo = 0
        exps = set(support)
        if exps:
            lo = min(exps)
            for e in exps:
                mask |= 1 << (e - lo)
        self.mask = mask
        self.shift = lo if mask else 0

    @classmethod
    def _raw(cls, mask: int, shift: int) -> "F2LaurentPoly":
        self = object.__new__(cls)
        if mask == 0:
            self.mask, self.shift = 0, 0
            return self
        low = (mask & -mask).bit_length() - 1
        self.mask = mask >> low
        self.shift = shift + low
        return self

    @classmethod
    def zero(cls) -> "F2LaurentPoly":
        return cls._raw(0, 0)

    @classmethod
    def one(cls) -> "F2LaurentPoly":
        return cls._raw(1, 0)

    @classmethod
    def t_power(cls, e: int) -> "F2LaurentPoly":
        return cls._raw(1, e)

    @classmethod
    def geometric(cls, step: int, count: int) -> "F2LaurentPoly":
        """1 + t**step + t**(2*step) + ... + t**((count-1)*step)."""
        mask = 0
        for i in range(count):
            mask |= 1 << (i * step)
        return cls._raw(mask, 0)

    def support(self) -> tuple[int, ...]:
        out = []
        m, s = self.mask, self.shift
        while m:
            low = m & -m
            out.append(s + low.bit_length() - 1)
            m &= m - 1
        return tuple(out)

    @property
    def min_exp(self) -> int:
        if self.mask == 0:
            raise ValueError("zero polynomial has no exponents")
        return self.shift

    @property
    def max_exp(self) -> int:
        if self.mask == 0:
            raise ValueError("zero polynomial has no exponents")
        return self.shift + self.mask.bit_length() - 1

    def is_zero(self) -> bool:
        return self.mask == 0

    def __bool__(self):
        return self.mask != 0

    def __len__(self):
        return self.mask.bit_count()

    def __add__(self, other):
        if not isinstance(other, F2LaurentPoly):
            return NotImplemented
        if self.mask == 0:
            return other
        if other.mask == 0:
            return self
        lo = min(self.shift, other.shift)
        m = (self.mask << (self.shift - lo)) ^ (other.mask << (other.shift - lo))
        return F2LaurentPoly._raw(m, lo)

    __sub__ = __add__  # characteristic 2

    def __mul__(self, other):
        if not isinstance(other, F2LaurentPoly):
            return NotImplemented
        return F2LaurentPoly._raw(
            mask_mul(self.mask, other.mask), self.shift + other.shift
        )

    def shifted(self, k: int) -> "F2LaurentPoly":
        """Multiply by t**k."""
        return F2LaurentPoly._raw(self.mask, self.shift + k)

    def spread(self, k: int) -> "F2LaurentPoly":
        """Substitute t -> t**k (k >= 1)."""
        return F2LaurentPoly._raw(mask_spread(self.mask, k), self.shift * k)

    def flip(self) -> "F2LaurentPoly":
        """Substitute t -> 1/t."""
        if self.mask == 0:
            return self
        return F2LaurentPoly._raw(
            mask_reverse(self.mask), -(self.shift + self.mask.bit_length() - 1)
        )

    def exact_div(self, other: "F2LaurentPoly"):
        """Exact quotient self/other in F2[t,1/t], or None if not divisible."""
        if other.mask == 0:
            raise ZeroDivisionError("division by zero polynomial")
        if self.mask == 0:
            return F2LaurentPoly.zero()
        q, r = mask_divmod(self.mask, other.mask)
        if r:
            return None
        return F2LaurentPoly._raw(q, self.shift - other.shift)

    def gcd(self, other: "F2LaurentPoly") -> "F2LaurentPoly":
        """Monic gcd with nonzero constant term (defined up to units t**k)."""
        return F2LaurentPoly._raw(mask_gcd(self.mask, other.mask), 0)

    def __eq__(self, other):
        return (
            isinstance(other, F2LaurentPoly)
            and self.mask == other.mask
            and self.shift == other.shift
        )

    def __hash__(self):
        return hash((self.mask, self.shift))

    def to_string(self, var: str = "t") -> str:
        if self.mask == 0:
            return "0"
        terms = []
        for e in self.support():
            if e == 0:
                terms.append("1")
            elif e == 1:
                terms.append(var)
            else:
                terms.append(f"{var}^{e}")
        return "+".join(terms)

    @classmethod
    def from_string(cls, text: str) -> "F2LaurentPoly":
        """Parse ``0``, or ``+``-joined terms ``1 | t | t^<int>`` (``s`` accepted too)."""
        text = text.replace(" ", "")
        if text == "0":
            return cls.zero()
        mask, lo = 0, None
        exps = []
        for term in text.split("+"):
            m = _TERM_RE.match(term)
            if not m:
                raise ValueError(f"bad polynomial term: {term!r}")
            if term == "1":
                exps.append(0)
            elif m.group(3) is not None:
                exps.append(int(m.group(3)))
            else:
                exps.append(1)
        lo = min(exps)
        for e in exps:
            mask ^= 1 << (e - lo)
        return cls._raw(mask, lo)

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"F2LaurentPoly({self.to_string()!r})"


def f2poly_arith(a: F2LaurentPoly, b: F2LaurentPoly, op: str) -> F2LaurentPoly:
    """Ring operation dispatch: ``op`` is ``"add"`` or ``"mul"``."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")
