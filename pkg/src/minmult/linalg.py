"""Exact dense linear algebra over prime fields and the rationals.

Prime-field matrices are ``int64`` numpy arrays with entries in ``[0, p)``;
rational matrices are ``object`` arrays of :class:`fractions.Fraction`.
Elimination over a prime field runs in a numba kernel; everything else is
plain numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numba
import numpy as np

__all__ = [
    "Field",
    "Matrix",
    "FieldMismatch",
    "ShapeMismatch",
    "Subspace",
    "is_prime",
    "rref",
    "kernel_basis",
    "rank",
    "solve",
    "multiply",
]


class FieldMismatch(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


# float64 holds every product of two residues exactly below this bound
_FLOAT_EXACT_P = 1 << 26


@numba.njit(cache=True)
def _rref_float(a, p):
    r, c = a.shape
    piv = np.empty(min(r, c), np.int64)
    row = 0
    pf = float(p)
    pinv = 1.0 / pf
    for j in range(c):
        if row == r:
            break
        k = -1
        for i in range(row, r):
            if a[i, j] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != row:
            for t in range(j, c):
                tmp = a[row, t]
                a[row, t] = a[k, t]
                a[k, t] = tmp
        x = int(a[row, j])
        e = p - 2
        inv = 1
        b = x % p
        while e > 0:
            if e & 1:
                inv = inv * b % p
            b = b * b % p
            e >>= 1
        fi = float(inv)
        for t in range(j, c):
            v = a[row, t] * fi
            v -= pf * np.floor(v * pinv)
            if v >= pf:
                v -= pf
            a[row, t] = v
        for i in range(r):
            if i != row:
                f = a[i, j]
                if f != 0:
                    for t in range(j, c):
                        v = a[i, t] - f * a[row, t]
                        v -= np.floor(v * pinv) * pf
                        if v < 0:
                            v += pf
                        elif v >= pf:
                            v -= pf
                        a[i, t] = v
        piv[row] = j
        row += 1
    return piv[:row]


@numba.njit(cache=True)
def _rref_int(a, p):
    r, c = a.shape
    piv = np.empty(min(r, c), np.int64)
    row = 0
    for j in range(c):
        if row == r:
            break
        k = -1
        for i in range(row, r):
            if a[i, j] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != row:
            for t in range(j, c):
                tmp = a[row, t]
                a[row, t] = a[k, t]
                a[k, t] = tmp
        e = p - 2
        inv = 1
        b = a[row, j] % p
        while e > 0:
            if e & 1:
                inv = inv * b % p
            b = b * b % p
            e >>= 1
        for t in range(j, c):
            a[row, t] = a[row, t] * inv % p
        for i in range(r):
            if i != row:
                f = a[i, j]
                if f != 0:
                    for t in range(j, c):
                        a[i, t] = (a[i, t] - f * a[row, t]) % p
        piv[row] = j
        row += 1
    return piv[:row]


@dataclass(frozen=True)
class Field:
    """A prime field ``F_p`` (``characteristic = p``) or ``Q`` (``characteristic = 0``)."""

    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p != 0 and not (2 <= p < 2**31 and is_prime(p)):
            raise ValueError(f"characteristic must be 0 or a prime below 2^31, got {p}")

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(int(p))

    @classmethod
    def rationals(cls) -> "Field":
        return cls(0)

    @property
    def is_prime_field(self) -> bool:
        return self.characteristic != 0

    @property
    def dtype(self):
        return np.int64 if self.characteristic else object

    def __str__(self):
        return f"GF({self.characteristic})" if self.characteristic else "QQ"

    # scalars

    def scalar(self, x):
        """Normalise an int, Fraction or ``"a/b"`` string into this field."""
        if isinstance(x, str):
            x = Fraction(x)
        p = self.characteristic
        if p:
            if isinstance(x, Fraction):
                if x.denominator % p == 0:
                    raise ZeroDivisionError(f"{x} has no image in GF({p})")
                return x.numerator % p * pow(x.denominator, -1, p) % p
            return int(x) % p
        return Fraction(x)

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        p = self.characteristic
        if p:
            return pow(int(x), -1, p)
        return 1 / Fraction(x)

    def power(self, x, e: int):
        if e < 0:
            return self.power(self.inv(x), -e)
        p = self.characteristic
        if p:
            return pow(int(x), e, p)
        return Fraction(x) ** e

    def to_str(self, x) -> str:
        return str(x)

    # arrays

    def array(self, rows) -> np.ndarray:
        a = np.array(rows, dtype=object)
        if a.size == 0:
            return np.zeros(a.shape, dtype=self.dtype)
        flat = [self.scalar(v) for v in a.ravel()]
        out = np.empty(a.shape, dtype=self.dtype)
        out.ravel()[:] = flat
        return out

    def zeros(self, *shape) -> np.ndarray:
        if self.characteristic:
            return np.zeros(shape, dtype=np.int64)
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros(n, n)
        for i in range(n):
            out[i, i] = 1 if self.characteristic else Fraction(1)
        return out

    def reduce(self, a: np.ndarray) -> np.ndarray:
        if self.characteristic:
            return np.mod(a, self.characteristic)
        return a

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise ShapeMismatch(f"cannot multiply {a.shape} by {b.shape}")
        p = self.characteristic
        if not p:
            if a.shape[1] == 0:
                return self.zeros(a.shape[0], b.shape[1])
            return a.dot(b)
        n = a.shape[1]
        if n == 0 or a.shape[0] == 0 or b.shape[1] == 0:
            return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        if (p - 1) ** 2 * n < 2**53:
            out = np.fmod(a.astype(np.float64) @ b.astype(np.float64), p)
            return out.astype(np.int64)
        # split the left factor into 16-bit limbs and chunk the inner dimension
        chunk = max(1, 2**53 // ((1 << 16) * (p - 1)))
        lo = (a & 0xFFFF).astype(np.float64)
        hi = (a >> 16).astype(np.float64)
        bf = b.astype(np.float64)
        acc = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for s in range(0, n, chunk):
            part_hi = np.fmod(hi[:, s:s + chunk] @ bf[s:s + chunk], p).astype(np.int64)
            part_lo = np.fmod(lo[:, s:s + chunk] @ bf[s:s + chunk], p).astype(np.int64)
            acc = (acc + (part_hi << 16) % p + part_lo) % p
        return acc

    def rref(self, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row-echelon form and pivot columns; the input is not modified.

        Pivot choice is deterministic: columns are scanned left to right and
        the first row (top to bottom) with a nonzero entry is used.
        """
        p = self.characteristic
        r, c = a.shape
        if r == 0 or c == 0:
            return a.copy(), []
        if p:
            if p < _FLOAT_EXACT_P:
                work = np.ascontiguousarray(a, dtype=np.float64)
                if work is a:
                    work = work.copy()
                piv = _rref_float(work, p)
                out = work.astype(np.int64)
            else:
                out = np.array(a, dtype=np.int64, copy=True)
                piv = _rref_int(out, p)
            k = len(piv)
            out[k:] = 0
            return out, [int(j) for j in piv]
        return _rref_rational(a)


def _rref_rational(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    out = np.array(a, dtype=object, copy=True)
    r, c = out.shape
    pivots = []
    row = 0
    for j in range(c):
        if row == r:
            break
        nz = [i for i in range(row, r) if out[i, j] != 0]
        if not nz:
            continue
        k = nz[0]
        if k != row:
            out[[row, k]] = out[[k, row]]
        out[row, j:] = out[row, j:] * (1 / Fraction(out[row, j]))
        for i in range(r):
            if i != row and out[i, j] != 0:
                out[i, j:] = out[i, j:] - out[i, j] * out[row, j:]
        pivots.append(j)
        row += 1
    for i in range(row, r):
        out[i, :] = Fraction(0)
    return out, pivots


@dataclass(frozen=True, eq=False)
class Matrix:
    """A dense matrix tagged with its field. Treated as immutable."""

    field: Field
    data: np.ndarray

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence]) -> "Matrix":
        return cls(field, field.array(rows))

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, field.eye(n))

    @classmethod
    def zero(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, field.zeros(rows, cols))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and bool(np.all(self.data == other.data))
        )

    def __hash__(self):
        return hash((self.field, self.shape, tuple(map(str, self.data.ravel()))))

    def tolist(self):
        return self.data.tolist()


def _same_field(*ms: Matrix) -> Field:
    f = ms[0].field
    for m in ms[1:]:
        if m.field != f:
            raise FieldMismatch(f"{f} vs {m.field}")
    return f


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    red, piv = m.field.rref(m.data)
    return Matrix(m.field, red), piv


def rank(m: Matrix) -> int:
    return len(m.field.rref(m.data)[1])


def kernel_basis(m: Matrix) -> Matrix:
    """Columns spanning the null space, one per non-pivot column of ``rref(m)``."""
    return Matrix(m.field, Subspace.kernel(m.field, m.data).basis.T.copy())


def multiply(m: Matrix, n: Matrix) -> Matrix:
    f = _same_field(m, n)
    return Matrix(f, f.matmul(m.data, n.data))


def solve(m: Matrix, b) -> Optional[list]:
    """A vector ``x`` with ``m x = b``, or ``None`` when ``b`` is not in the column space."""
    if isinstance(b, Matrix):
        _same_field(m, b)
        bv = b.data.reshape(-1)
    else:
        bv = m.field.array(list(b))
    f = m.field
    if bv.shape[0] != m.rows:
        raise ShapeMismatch(f"right-hand side has length {bv.shape[0]}, expected {m.rows}")
    aug = np.concatenate([m.data, bv.reshape(-1, 1).astype(m.data.dtype)], axis=1)
    red, piv = f.rref(aug)
    if piv and piv[-1] == m.cols:
        return None
    x = f.zeros(m.cols)
    for i, j in enumerate(piv):
        x[j] = red[i, m.cols]
    return list(x)


class Subspace:
    """A subspace of ``field^n`` with a basis normalised at ``coord_cols``.

    ``basis[:, coord_cols]`` is the identity, so the coordinates of a member
    vector ``v`` are simply ``v[coord_cols]``.
    """

    __slots__ = ("field", "ambient", "basis", "coord_cols")

    def __init__(self, field: Field, ambient: int, basis: np.ndarray, coord_cols):
        self.field = field
        self.ambient = ambient
        self.basis = basis
        self.coord_cols = np.asarray(coord_cols, dtype=np.int64)

    @classmethod
    def span(cls, field: Field, vectors: np.ndarray, ambient: int | None = None) -> "Subspace":
        """Row span of ``vectors`` (one vector per row)."""
        if ambient is None:
            ambient = vectors.shape[1]
        if vectors.shape[0] == 0:
            return cls.zero(field, ambient)
        red, piv = field.rref(vectors)
        return cls(field, ambient, red[: len(piv)].copy(), piv)

    @classmethod
    def zero(cls, field: Field, ambient: int) -> "Subspace":
        return cls(field, ambient, field.zeros(0, ambient), [])

    @classmethod
    def whole(cls, field: Field, ambient: int) -> "Subspace":
        return cls(field, ambient, field.eye(ambient), list(range(ambient)))

    @classmethod
    def kernel(cls, field: Field, a: np.ndarray) -> "Subspace":
        """Null space of ``a`` (acting on column vectors)."""
        c = a.shape[1]
        red, piv = field.rref(a)
        pivset = set(piv)
        free = [j for j in range(c) if j not in pivset]
        basis = field.zeros(len(free), c)
        for row, f in enumerate(free):
            basis[row, f] = 1
        if piv and free:
            basis[:, np.array(piv, dtype=np.int64)] = field.reduce(-red[: len(piv)][:, free].T)
        return cls(field, c, basis, free)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def coords(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates of member vectors (rows) in this basis."""
        return vectors[:, self.coord_cols]

    def contains(self, vectors: np.ndarray) -> bool:
        if vectors.shape[0] == 0:
            return True
        recon = self.field.matmul(self.coords(vectors), self.basis)
        return bool(np.all(recon == self.field.reduce(vectors)))

    def complement_cols(self) -> np.ndarray:
        mask = np.ones(self.ambient, dtype=bool)
        mask[self.coord_cols] = False
        return np.flatnonzero(mask)

    def quotient_map(self) -> tuple[np.ndarray, np.ndarray]:
        """``(proj, cols)``: ``proj`` sends ambient vectors (columns) to quotient coordinates.

        The quotient basis is the image of the unit vectors at ``cols``.
        """
        f = self.field
        cols = self.complement_cols()
        q = len(cols)
        proj = f.zeros(q, self.ambient)
        for i, c in enumerate(cols):
            proj[i, c] = 1
        if self.dim and q:
            proj[:, self.coord_cols] = f.reduce(-self.basis[:, cols].T)
        return proj, cols

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.field, np.concatenate([self.basis, other.basis]), self.ambient)
