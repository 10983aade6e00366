"""Dense exact matrices over Q and over F2(t).

One generic elimination core serves both scalar types; the subclasses
pin the scalar ring and its string form.  Degenerate shapes (0xn, nx0,
0x0) are legal for every operation, so zero-dimensional blocks can flow
through group-law formulas unchanged.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import SingularMatrix
from .ratfun import F2RatFun


class Mat:
    """Immutable rectangular matrix over an exact field."""

    __slots__ = ("rows", "_nc")

    @classmethod
    def _zero(cls):
        raise NotImplementedError

    @classmethod
    def _one(cls):
        raise NotImplementedError

    @classmethod
    def _coerce(cls, x):
        raise NotImplementedError

    def __init__(self, rows, ncols=None):
        rows = tuple(tuple(self._coerce(x) for x in row) for row in rows)
        if rows:
            ncols = len(rows[0])
            if any(len(r) != ncols for r in rows):
                raise ValueError("ragged rows")
        self.rows = rows
        self._nc = ncols if ncols is not None else 0

    @classmethod
    def _raw(cls, rows, ncols=None):
        self = object.__new__(cls)
        self.rows = tuple(tuple(row) for row in rows)
        self._nc = len(self.rows[0]) if self.rows else (ncols or 0)
        return self

    @classmethod
    def identity(cls, n: int):
        one, zero = cls._one(), cls._zero()
        return cls._raw(
            (tuple(one if i == j else zero for j in range(n)) for i in range(n)),
            ncols=n,
        )

    @classmethod
    def zeros(cls, r: int, c: int):
        zero = cls._zero()
        return cls._raw(((zero,) * c for _ in range(r)), ncols=c)

    @classmethod
    def column(cls, entries):
        return cls([[x] for x in entries], ncols=1)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return self._nc

    def entry(self, i: int, j: int):
        return self.rows[i][j]

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def transpose(self):
        if not self.rows:
            return type(self)._raw(((),) * self._nc, ncols=0)
        return type(self)._raw(zip(*self.rows), ncols=self.nrows)

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return type(self)._raw(
            (tuple(a + b for a, b in zip(r1, r2))
             for r1, r2 in zip(self.rows, other.rows)),
            ncols=self._nc,
        )

    def __sub__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return type(self)._raw(
            (tuple(a - b for a, b in zip(r1, r2))
             for r1, r2 in zip(self.rows, other.rows)),
            ncols=self._nc,
        )

    def __neg__(self):
        return type(self)._raw(
            (tuple(-a for a in row) for row in self.rows), ncols=self._nc
        )

    def __mul__(self, other):
        if type(other) is type(self):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch")
            cols = other.transpose().rows
            zero = self._zero()
            return type(self)._raw(
                (tuple(sum((a * b for a, b in zip(row, col)), zero) for col in cols)
                 for row in self.rows),
                ncols=other.ncols,
            )
        try:
            scalar = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return type(self)._raw(
            (tuple(a * scalar for a in row) for row in self.rows), ncols=self._nc
        )

    def __rmul__(self, other):
        try:
            scalar = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return type(self)._raw(
            (tuple(scalar * a for a in row) for row in self.rows), ncols=self._nc
        )

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and self.rows == other.rows
            and self._nc == other._nc
        )

    def __hash__(self):
        return hash((self.rows, self._nc))

    def _rref(self, aug: int = 0):
        """Row-reduce over the field.

        Returns (rows as lists, pivot column list).  The last ``aug``
        columns are carried along but never used as pivots.
        """
        rows = [list(r) for r in self.rows]
        nr, nc = len(rows), self._nc
        pivots = []
        r = 0
        for c in range(nc - aug):
            p = next((i for i in range(r, nr) if rows[i][c]), None)
            if p is None:
                continue
            rows[r], rows[p] = rows[p], rows[r]
            inv = self._inv_scalar(rows[r][c])
            rows[r] = [x * inv for x in rows[r]]
            for i in range(nr):
                if i != r and rows[i][c]:
                    f = rows[i][c]
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == nr:
                break
        return rows, pivots

    @staticmethod
    def _inv_scalar(x):
        raise NotImplementedError

    def det(self):
        if not self.is_square():
            raise ValueError("determinant of non-square matrix")
        n = self.nrows
        if n == 0:
            return self._one()
        rows = [list(r) for r in self.rows]
        det = self._one()
        for c in range(n):
            p = next((i for i in range(c, n) if rows[i][c]), None)
            if p is None:
                return self._zero()
            if p != c:
                rows[c], rows[p] = rows[p], rows[c]
                det = -det
            det = det * rows[c][c]
            inv = self._inv_scalar(rows[c][c])
            for i in range(c + 1, n):
                if rows[i][c]:
                    f = rows[i][c] * inv
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
        return det

    def inv(self):
        if not self.is_square():
            raise ValueError("inverse of non-square matrix")
        n = self.nrows
        if n == 0:
            return self
        ident = type(self).identity(n)
        aug = type(self)._raw(
            (tuple(r) + tuple(i) for r, i in zip(self.rows, ident.rows)), ncols=2 * n
        )
        rows, pivots = aug._rref(aug=n)
        if len(pivots) < n:
            raise SingularMatrix("matrix is not invertible")
        return type(self)._raw((tuple(row[n:]) for row in rows), ncols=n)

    def solve(self, b: "Mat"):
        """One exact solution of self * x = b, or None if inconsistent."""
        if b.nrows != self.nrows:
            raise ValueError("shape mismatch")
        k = b.ncols
        nc = self.ncols
        if self.nrows == 0:
            return type(self).zeros(nc, k)
        aug = type(self)._raw(
            (tuple(r) + tuple(br) for r, br in zip(self.rows, b.rows)), ncols=nc + k
        )
        rows, pivots = aug._rref(aug=k)
        for row in rows[len(pivots):]:
            if any(row[nc:]):
                return None
        zero = self._zero()
        out = [[zero] * k for _ in range(nc)]
        for r, c in enumerate(pivots):
            out[c] = list(rows[r][nc:])
        return type(self)._raw(out, ncols=k)

    def nullspace(self):
        """Basis of the right kernel, as a list of column matrices."""
        nc = self.ncols
        if self.nrows == 0:
            return [
                type(self).column(
                    [self._one() if i == j else self._zero() for i in range(nc)]
                )
                for j in range(nc)
            ]
        rows, pivots = self._rref()
        free = [c for c in range(nc) if c not in pivots]
        basis = []
        zero, one = self._zero(), self._one()
        for f in free:
            vec = [zero] * nc
            vec[f] = one
            for r, c in enumerate(pivots):
                vec[c] = -rows[r][f]
            basis.append(type(self).column(vec))
        return basis

    def rank(self) -> int:
        return len(self._rref()[1])

    def to_strings(self):
        return [[self._to_str(x) for x in row] for row in self.rows]

    @classmethod
    def from_strings(cls, rows, ncols=None):
        return cls(rows, ncols=ncols)

    @staticmethod
    def _to_str(x):
        return str(x)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_strings()!r})"


class MatQ(Mat):
    """Matrix over Q with arbitrary-precision rational entries."""

    __slots__ = ()

    @classmethod
    def _zero(cls):
        return Fraction(0)

    @classmethod
    def _one(cls):
        return Fraction(1)

    @classmethod
    def _coerce(cls, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, (int, str)):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} to a rational")

    @staticmethod
    def _inv_scalar(x):
        return 1 / x


class MatF2Rat(Mat):
    """Matrix over the rational function field F2(t)."""

    __slots__ = ()

    @classmethod
    def _zero(cls):
        return F2RatFun.zero()

    @classmethod
    def _one(cls):
        return F2RatFun.one()

    @classmethod
    def _coerce(cls, x):
        if isinstance(x, F2RatFun):
            return x
        if isinstance(x, str):
            return F2RatFun.from_string(x)
        if isinstance(x, int) and x in (0, 1):
            return F2RatFun(x)
        raise TypeError(f"cannot coerce {x!r} to F2(t)")

    @staticmethod
    def _inv_scalar(x):
        return x.inverse()

    @staticmethod
    def _to_str(x):
        return x.to_string()


def matf2rat_inverse(a: MatF2Rat) -> MatF2Rat:
    """Exact inverse over F2(t); raises SingularMatrix when det = 0."""
    return a.inv()
