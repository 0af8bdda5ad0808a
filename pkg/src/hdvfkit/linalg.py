"""Vectors and matrices over GF(2).

Matrices store each row as a Python int bitset (bit ``j`` set means entry
``(i, j)`` is 1).  Elimination is delegated to :mod:`hdvfkit._kernels`, which
picks the compiled backend when available.  Pivoting always takes the lowest
available column and, within it, the lowest available row.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from hdvfkit import _kernels


class DimensionError(ValueError):
    """Operand shapes do not fit the operation."""


class SingularError(ArithmeticError):
    """A square matrix has no inverse.  ``witness`` is a nonzero kernel vector."""

    def __init__(self, witness: "Gf2Vector", message: str = "matrix is singular"):
        super().__init__(f"{message}; kernel witness {sorted(witness.support)}")
        self.witness = witness


class NoSolution(ArithmeticError):
    """The linear system ``m x = b`` is inconsistent."""


def iter_bits(bits: int):
    """Yield the positions of the set bits of ``bits`` in increasing order."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def bits_of(positions: Iterable[int]) -> int:
    out = 0
    for p in positions:
        out ^= 1 << p
    return out


def gather_bits(bits: int, positions: Sequence[int]) -> int:
    """Restrict ``bits`` to ``positions``, renumbering ``positions[k]`` as ``k``."""
    out = 0
    for k, p in enumerate(positions):
        if bits >> p & 1:
            out |= 1 << k
    return out


def scatter_bits(local: int, positions: Sequence[int]) -> int:
    """Inverse of :func:`gather_bits`: local bit ``k`` goes to ``positions[k]``."""
    out = 0
    for k in iter_bits(local):
        out |= 1 << positions[k]
    return out


@dataclass(frozen=True)
class Gf2Vector:
    """A vector of length ``size`` identified with its support."""

    size: int
    support: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "support", frozenset(self.support))
        for i in self.support:
            if not 0 <= i < self.size:
                raise DimensionError(f"index {i} outside vector of size {self.size}")

    @classmethod
    def from_bits(cls, size: int, bits: int) -> "Gf2Vector":
        return cls(size, frozenset(iter_bits(bits)))

    @property
    def bits(self) -> int:
        return bits_of(self.support)

    def __add__(self, other: "Gf2Vector") -> "Gf2Vector":
        if self.size != other.size:
            raise DimensionError("vector sizes differ")
        return Gf2Vector(self.size, self.support ^ other.support)

    def __bool__(self):
        return bool(self.support)

    def __len__(self):
        return self.size

    def to_list(self) -> list[int]:
        return [int(i in self.support) for i in range(self.size)]


class Gf2Matrix:
    """An ``nrows x ncols`` matrix over GF(2) stored as row bitsets."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Iterable[int] | None = None):
        if nrows < 0 or ncols < 0:
            raise DimensionError("negative shape")
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            self.rows = (0,) * nrows
        else:
            self.rows = tuple(rows)
            if len(self.rows) != nrows:
                raise DimensionError(f"expected {nrows} rows, got {len(self.rows)}")
            limit = 1 << ncols
            for r in self.rows:
                if r < 0 or r >= limit:
                    raise DimensionError(f"row bitset {r:#x} exceeds {ncols} columns")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Gf2Matrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls(n, n, (1 << i for i in range(n)))

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]], ncols: int | None = None) -> "Gf2Matrix":
        nrows = len(dense)
        if ncols is None:
            ncols = len(dense[0]) if nrows else 0
        rows = []
        for line in dense:
            if len(line) != ncols:
                raise DimensionError("ragged dense matrix")
            rows.append(bits_of(j for j, v in enumerate(line) if v % 2))
        return cls(nrows, ncols, rows)

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Iterable[tuple[int, int]]) -> "Gf2Matrix":
        rows = [0] * nrows
        for i, j in entries:
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise DimensionError(f"entry {(i, j)} out of bounds")
            rows[i] ^= 1 << j
        return cls(nrows, ncols, rows)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[int]) -> "Gf2Matrix":
        return cls(len(columns), nrows, columns).transpose()

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def entries(self) -> frozenset:
        return frozenset((i, j) for i, r in enumerate(self.rows) for j in iter_bits(r))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(ij)
        return self.rows[i] >> j & 1

    def column(self, j: int) -> int:
        """Column ``j`` as a bitset over rows."""
        out = 0
        for i, r in enumerate(self.rows):
            if r >> j & 1:
                out |= 1 << i
        return out

    def columns(self) -> list[int]:
        return list(self.transpose().rows)

    def transpose(self) -> "Gf2Matrix":
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            for j in iter_bits(r):
                cols[j] |= 1 << i
        return Gf2Matrix(self.ncols, self.nrows, cols)

    T = property(transpose)

    def apply(self, x: int) -> int:
        """Return ``self @ x`` for a column vector given as a bitset."""
        out = 0
        for i, r in enumerate(self.rows):
            if (r & x).bit_count() & 1:
                out |= 1 << i
        return out

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Gf2Matrix":
        return Gf2Matrix(len(row_idx), len(col_idx), (gather_bits(self.rows[i], col_idx) for i in row_idx))

    def is_zero(self) -> bool:
        return not any(self.rows)

    def __matmul__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        return matmul(self, other)

    def __add__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return Gf2Matrix(self.nrows, self.ncols, (a ^ b for a, b in zip(self.rows, other.rows)))

    __sub__ = __add__

    def __eq__(self, other):
        if not isinstance(other, Gf2Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.nrows, self.ncols, self.rows))

    def to_dense(self) -> list[list[int]]:
        return [[r >> j & 1 for j in range(self.ncols)] for r in self.rows]

    def __repr__(self):
        body = "; ".join("".join(str(v) for v in row) for row in self.to_dense())
        return f"Gf2Matrix({self.nrows}x{self.ncols}: [{body}])"


def matmul(a: Gf2Matrix, b: Gf2Matrix) -> Gf2Matrix:
    if a.ncols != b.nrows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    brows = b.rows
    out = []
    for r in a.rows:
        acc = 0
        while r:
            low = r & -r
            acc ^= brows[low.bit_length() - 1]
            r ^= low
        out.append(acc)
    return Gf2Matrix(a.nrows, b.ncols, out)


def transpose(m: Gf2Matrix) -> Gf2Matrix:
    return m.transpose()


def rank(m: Gf2Matrix) -> int:
    return _kernels.rank(m.rows, m.ncols)


def _kernel_from_rref(rows, pivots, ncols) -> list[int]:
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = 1 << free
        for r, p in enumerate(pivots):
            if rows[r] >> free & 1:
                v |= 1 << p
        basis.append(v)
    return basis


def kernel_basis(m: Gf2Matrix) -> list[Gf2Vector]:
    """Basis of the null space, one vector per free column (in column order)."""
    rows, pivots = _kernels.rref(m.rows, m.ncols)
    return [Gf2Vector.from_bits(m.ncols, v) for v in _kernel_from_rref(rows, pivots, m.ncols)]


def invert(m: Gf2Matrix) -> Gf2Matrix:
    """Inverse of a square matrix; raises :class:`SingularError` with a kernel witness."""
    if m.nrows != m.ncols:
        raise DimensionError(f"cannot invert non-square {m.shape} matrix")
    n = m.nrows
    aug = [r | (1 << (n + i)) for i, r in enumerate(m.rows)]
    rows, pivots = _kernels.rref(aug, n)
    if len(pivots) < n:
        mask = (1 << n) - 1
        reduced = [r & mask for r in rows]
        witness = _kernel_from_rref(reduced, pivots, n)[0]
        raise SingularError(Gf2Vector.from_bits(n, witness))
    return Gf2Matrix(n, n, (r >> n for r in rows))


def solve(m: Gf2Matrix, b: Gf2Vector | int) -> Gf2Vector:
    """Some ``x`` with ``m x = b``; free variables are set to zero.

    Raises :class:`NoSolution` when the system is inconsistent.
    """
    if isinstance(b, Gf2Vector):
        if b.size != m.nrows:
            raise DimensionError(f"right-hand side of size {b.size} for {m.nrows} rows")
        bbits = b.bits
    else:
        bbits = b
    n = m.ncols
    aug = [r | ((bbits >> i & 1) << n) for i, r in enumerate(m.rows)]
    rows, pivots = _kernels.rref(aug, n)
    for r in rows[len(pivots):]:
        if r >> n & 1:
            raise NoSolution("inconsistent GF(2) system")
    x = 0
    for r, p in enumerate(pivots):
        if rows[r] >> n & 1:
            x |= 1 << p
    return Gf2Vector.from_bits(n, x)


def in_span(vectors: Sequence[int], v: int, width: int) -> bool:
    """Whether bitset ``v`` lies in the span of ``vectors`` (all of ``width`` bits)."""
    base = _kernels.rank(list(vectors), width)
    return _kernels.rank([*vectors, v], width) == base


def independent_subset(vectors: Sequence[int]) -> list[int]:
    """Indices of the greedy (lowest index first) maximal independent subfamily."""
    reducer: dict[int, int] = {}
    chosen = []
    for k, v in enumerate(vectors):
        while v:
            top = v.bit_length() - 1
            if top in reducer:
                v ^= reducer[top]
            else:
                reducer[top] = v
                chosen.append(k)
                break
    return chosen
