"""Dense GF(2) linear algebra on bit-packed vectors and matrices.

Vectors and matrices are backed by arbitrary-precision Python integers
(bit i of the payload is coordinate i), so results are independent of any
machine word size. All values are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True)
class BitVector:
    """A fixed-length vector over GF(2), packed into an int."""

    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("payload has bits outside [0, length)")

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> "BitVector":
        bits = 0
        for i in support:
            if not 0 <= i < length:
                raise ValueError(f"index {i} outside [0, {length})")
            bits |= 1 << i
        return cls(length, bits)

    @classmethod
    def from_bits(cls, values: Sequence[int]) -> "BitVector":
        bits = 0
        for i, v in enumerate(values):
            if v & 1:
                bits |= 1 << i
        return cls(len(values), bits)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} != {other.length}")
        return BitVector(self.length, self.bits ^ other.bits)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __iter__(self) -> Iterator[int]:
        return ((self.bits >> i) & 1 for i in range(self.length))

    def weight(self) -> int:
        return self.bits.bit_count()

    def support(self) -> list[int]:
        return [i for i in range(self.length) if (self.bits >> i) & 1]

    def __str__(self) -> str:
        return "".join(str(b) for b in self)


@dataclass(frozen=True)
class BitMatrix:
    """A rows x cols matrix over GF(2), one packed int per row."""

    rows: tuple[int, ...]
    cols: int

    def __post_init__(self):
        for r in self.rows:
            if r < 0 or r >> self.cols:
                raise ValueError("row has bits outside [0, cols)")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: int | None = None) -> "BitMatrix":
        packed = []
        width = cols
        for row in rows:
            vals = list(row)
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ValueError("ragged rows")
            bits = 0
            for i, v in enumerate(vals):
                if v & 1:
                    bits |= 1 << i
            packed.append(bits)
        if width is None:
            raise ValueError("cols required for an empty matrix")
        return cls(tuple(packed), width)

    @classmethod
    def from_row_vectors(cls, rows: Iterable[BitVector], cols: int) -> "BitMatrix":
        packed = []
        for v in rows:
            if v.length != cols:
                raise ValueError("row length mismatch")
            packed.append(v.bits)
        return cls(tuple(packed), cols)

    @classmethod
    def from_supports(cls, supports: Iterable[Iterable[int]], cols: int) -> "BitMatrix":
        return cls(tuple(BitVector.from_support(cols, s).bits for s in supports), cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(tuple(1 << i for i in range(n)), n)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.cols)

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.rows[i])

    def row_vectors(self) -> list[BitVector]:
        return [BitVector(self.cols, r) for r in self.rows]

    def to_dense(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.rows]


def rank(m: BitMatrix) -> int:
    """GF(2) row rank via Gaussian elimination."""
    work = list(m.rows)
    rk = 0
    for col in range(m.cols):
        mask = 1 << col
        pivot = None
        for r in range(rk, len(work)):
            if work[r] & mask:
                pivot = r
                break
        if pivot is None:
            continue
        work[rk], work[pivot] = work[pivot], work[rk]
        for r in range(len(work)):
            if r != rk and (work[r] & mask):
                work[r] ^= work[rk]
        rk += 1
        if rk == len(work):
            break
    return rk


def kernel_basis(m: BitMatrix) -> list[BitVector]:
    """Basis of {v : M v = 0}, in canonical (pivot-ordered) form.

    Basis vectors are indexed by the free columns of the reduced row
    echelon form, in increasing column order, so the output is
    deterministic for a given matrix.
    """
    work = list(m.rows)
    pivot_cols: list[int] = []
    rk = 0
    for col in range(m.cols):
        mask = 1 << col
        pivot = None
        for r in range(rk, len(work)):
            if work[r] & mask:
                pivot = r
                break
        if pivot is None:
            continue
        work[rk], work[pivot] = work[pivot], work[rk]
        for r in range(len(work)):
            if r != rk and (work[r] & mask):
                work[r] ^= work[rk]
        pivot_cols.append(col)
        rk += 1
        if rk == len(work):
            break
    pivot_set = set(pivot_cols)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        bits = 1 << free
        for i, pc in enumerate(pivot_cols):
            if (work[i] >> free) & 1:
                bits |= 1 << pc
        basis.append(BitVector(m.cols, bits))
    return basis


def mat_vec(m: BitMatrix, v: BitVector) -> BitVector:
    """GF(2) matrix-vector product; row i of the result is <row_i, v>."""
    if v.length != m.cols:
        raise ValueError(f"dimension mismatch: {m.cols} cols vs length {v.length}")
    bits = 0
    for i, row in enumerate(m.rows):
        if (row & v.bits).bit_count() & 1:
            bits |= 1 << i
    return BitVector(len(m.rows), bits)


def symplectic_product(x_support: BitVector, z_support: BitVector) -> int:
    """Parity of the overlap of two supports; 1 means the operators anticommute."""
    if x_support.length != z_support.length:
        raise ValueError("length mismatch")
    return (x_support.bits & z_support.bits).bit_count() & 1


class RowSpace:
    """Incremental GF(2) row space (echelon form), for membership and rank queries."""

    def __init__(self, rows: Iterable[int] = (), cols: int | None = None):
        self.cols = cols
        self._pivots: dict[int, int] = {}  # pivot column -> reduced row
        for r in rows:
            self.add(r)

    @classmethod
    def of_matrix(cls, m: BitMatrix) -> "RowSpace":
        return cls(m.rows, m.cols)

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def reduce(self, bits: int) -> int:
        for col, row in self._pivots.items():
            if (bits >> col) & 1:
                bits ^= row
        return bits

    def contains(self, bits: int) -> bool:
        return self.reduce(bits) == 0

    def add(self, bits: int) -> bool:
        """Add a row; returns True if it enlarged the space."""
        bits = self.reduce(bits)
        if bits == 0:
            return False
        pivot = bits.bit_length() - 1
        # Keep stored rows reduced against the new pivot.
        for col in list(self._pivots):
            if (self._pivots[col] >> pivot) & 1:
                self._pivots[col] ^= bits
        self._pivots[pivot] = bits
        return True

    def copy(self) -> "RowSpace":
        dup = RowSpace(cols=self.cols)
        dup._pivots = dict(self._pivots)
        return dup
