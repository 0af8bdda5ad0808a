"""Cell complexes over GF(2): chains, boundary, Betti numbers, subcomplexes, duals."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from hdvfkit import _kernels
from hdvfkit.linalg import Gf2Matrix, iter_bits, kernel_basis


class ComplexError(ValueError):
    """Malformed complex description.  ``cell`` names the offending cell."""

    def __init__(self, message: str, cell: str | None = None):
        super().__init__(message)
        self.cell = cell


@dataclass(frozen=True)
class Cell:
    id: str
    dim: int


@dataclass(frozen=True)
class Chain:
    """A GF(2) chain of dimension ``dim``, identified with its support."""

    dim: int
    support: frozenset = frozenset()

    def __post_init__(self):
        if not isinstance(self.support, frozenset):
            object.__setattr__(self, "support", frozenset(self.support))

    @classmethod
    def from_cells(cls, dim: int, cells: Iterable[str]) -> "Chain":
        """Sum of ``cells`` with GF(2) cancellation of repeated entries."""
        counts = Counter(cells)
        return cls(dim, frozenset(c for c, n in counts.items() if n % 2))

    @classmethod
    def zero(cls, dim: int) -> "Chain":
        return cls(dim, frozenset())

    def __add__(self, other: "Chain") -> "Chain":
        if not isinstance(other, Chain):
            return NotImplemented
        if self.dim != other.dim:
            raise ValueError(f"cannot add chains of dimensions {self.dim} and {other.dim}")
        return Chain(self.dim, self.support ^ other.support)

    __sub__ = __add__

    def __bool__(self):
        return bool(self.support)

    def __len__(self):
        return len(self.support)

    def __iter__(self):
        return iter(self.support)

    def __contains__(self, cell):
        return cell in self.support

    def __repr__(self):
        cells = " + ".join(sorted(self.support)) or "0"
        return f"Chain[{self.dim}]({cells})"


def dual_id(cell_id: str) -> str:
    """Toggle the ``*`` prefix that marks dual cells (an involution on ids)."""
    return cell_id[1:] if cell_id.startswith("*") else "*" + cell_id


class ChainComplex:
    """A finite cell complex with boundary over GF(2).

    Cells keep the order they were given in; that order (``order_of``) is the
    tie-breaking order used everywhere a "lowest" cell is chosen.  Within each
    dimension, cell positions index the rows/columns of the boundary matrices.
    """

    def __init__(self, cells: Iterable[Cell], boundary: Mapping[str, Iterable[str]], *, _trusted=False):
        cells = tuple(cells)
        self._cells = cells
        self._order: dict[str, int] = {}
        self._dim: dict[str, int] = {}
        for i, cell in enumerate(cells):
            if cell.id in self._order:
                raise ComplexError(f"duplicate cell id {cell.id!r}", cell.id)
            if not isinstance(cell.dim, int) or cell.dim < 0:
                raise ComplexError(f"cell {cell.id!r} has invalid dimension {cell.dim!r}", cell.id)
            self._order[cell.id] = i
            self._dim[cell.id] = cell.dim
        self.n = max(self._dim.values(), default=-1)
        self._by_dim: list[tuple[str, ...]] = [()] * (self.n + 1)
        grouped: list[list[str]] = [[] for _ in range(self.n + 1)]
        for cell in cells:
            grouped[cell.dim].append(cell.id)
        self._by_dim = [tuple(g) for g in grouped]
        self._pos = {cid: i for group in self._by_dim for i, cid in enumerate(group)}

        if _trusted:
            self._boundary = {c.id: frozenset(boundary.get(c.id, ())) for c in cells}
        else:
            self._boundary = {}
            for cell in cells:
                faces = Counter(boundary.get(cell.id, ()))
                for face in faces:
                    if face not in self._dim:
                        raise ComplexError(f"cell {cell.id!r} references unknown cell {face!r}", cell.id)
                    if self._dim[face] != cell.dim - 1:
                        raise ComplexError(
                            f"cell {cell.id!r} (dim {cell.dim}) has face {face!r} of dim {self._dim[face]}",
                            cell.id,
                        )
                self._boundary[cell.id] = frozenset(f for f, k in faces.items() if k % 2)
            extra = set(boundary) - set(self._order)
            if extra:
                bad = sorted(extra)[0]
                raise ComplexError(f"boundary given for unknown cell {bad!r}", bad)
            for cell in cells:
                twice = Counter(g for f in self._boundary[cell.id] for g in self._boundary[f])
                if any(k % 2 for k in twice.values()):
                    raise ComplexError(f"boundary of boundary of {cell.id!r} is nonzero", cell.id)

        self._bmat: dict[int, Gf2Matrix] = {}
        self._cofaces: dict[str, frozenset] | None = None
        self._betti: dict[int, int] = {}

    # -- basic access -------------------------------------------------------

    def __len__(self):
        return len(self._cells)

    def __contains__(self, cell_id):
        return cell_id in self._order

    def __iter__(self):
        return iter(self._cells)

    @property
    def cells(self) -> tuple[Cell, ...]:
        return self._cells

    def ids(self) -> list[str]:
        return [c.id for c in self._cells]

    def cells_of_dim(self, q: int) -> tuple[str, ...]:
        if 0 <= q <= self.n:
            return self._by_dim[q]
        return ()

    def dim(self, cell_id: str) -> int:
        return self._dim[cell_id]

    def order_of(self, cell_id: str) -> int:
        return self._order[cell_id]

    def position(self, cell_id: str) -> int:
        """Index of the cell among the cells of its dimension."""
        return self._pos[cell_id]

    def sorted_ids(self, ids: Iterable[str]) -> list[str]:
        return sorted(ids, key=self._order.__getitem__)

    def faces(self, cell_id: str) -> frozenset:
        return self._boundary[cell_id]

    def cofaces(self, cell_id: str) -> frozenset:
        if self._cofaces is None:
            acc: dict[str, set] = {c.id: set() for c in self._cells}
            for cid, faces in self._boundary.items():
                for f in faces:
                    acc[f].add(cid)
            self._cofaces = {k: frozenset(v) for k, v in acc.items()}
        return self._cofaces[cell_id]

    def boundary_dict(self) -> dict[str, frozenset]:
        return dict(self._boundary)

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return self._dim == other._dim and self._boundary == other._boundary

    def __hash__(self):
        return hash(frozenset(self._boundary.items()))

    def __repr__(self):
        counts = [len(g) for g in self._by_dim]
        return f"ChainComplex(cells per dim={counts})"

    # -- chains <-> bitsets ---------------------------------------------------

    def chain_bits(self, chain: Chain) -> int:
        """Bitset over the positions of ``chain.dim``-cells."""
        out = 0
        for c in chain.support:
            if self._dim.get(c) != chain.dim:
                raise ComplexError(f"cell {c!r} is not a {chain.dim}-cell of this complex", c)
            out |= 1 << self._pos[c]
        return out

    def bits_chain(self, q: int, bits: int) -> Chain:
        group = self.cells_of_dim(q)
        return Chain(q, frozenset(group[i] for i in iter_bits(bits)))

    def chain(self, cells: Iterable[str]) -> Chain:
        """Chain with the given cells; the dimension is read off the cells."""
        cells = list(cells)
        if not cells:
            raise ComplexError("cannot infer the dimension of an empty chain")
        dims = {self._dim[c] if c in self._dim else None for c in cells}
        if None in dims:
            bad = next(c for c in cells if c not in self._dim)
            raise ComplexError(f"unknown cell {bad!r}", bad)
        if len(dims) != 1:
            raise ComplexError(f"chain mixes dimensions {sorted(dims)}")
        return Chain.from_cells(dims.pop(), cells)

    # -- boundary -----------------------------------------------------------

    def boundary_matrix(self, q: int) -> Gf2Matrix:
        """Matrix of the q-boundary: rows are (q-1)-cells, columns q-cells."""
        if q not in self._bmat:
            cols = self.cells_of_dim(q)
            rows_ids = self.cells_of_dim(q - 1)
            rows = [0] * len(rows_ids)
            for j, cid in enumerate(cols):
                for f in self._boundary[cid]:
                    rows[self._pos[f]] |= 1 << j
            self._bmat[q] = Gf2Matrix(len(rows_ids), len(cols), rows)
        return self._bmat[q]

    def boundary(self, chain: Chain) -> Chain:
        out: set = set()
        for c in chain.support:
            if c not in self._dim:
                raise ComplexError(f"unknown cell {c!r}", c)
            if self._dim[c] != chain.dim:
                raise ComplexError(f"cell {c!r} is not of dimension {chain.dim}", c)
            out ^= self._boundary[c]
        return Chain(chain.dim - 1, frozenset(out))

    def coboundary(self, chain: Chain) -> Chain:
        out: set = set()
        for c in chain.support:
            out ^= self.cofaces(c)
        return Chain(chain.dim + 1, frozenset(out))

    def is_cycle(self, chain: Chain) -> bool:
        return not self.boundary(chain)

    def is_cocycle(self, chain: Chain) -> bool:
        return not self.coboundary(chain)

    # -- homology oracle ----------------------------------------------------

    def boundary_rank(self, q: int) -> int:
        m = self.boundary_matrix(q)
        return _kernels.rank(m.rows, m.ncols)

    def betti(self, q: int) -> int:
        """dim ker d_q - rank d_{q+1}, by GF(2) ranks only."""
        if q < 0 or q > self.n:
            return 0
        if q not in self._betti:
            nq = len(self._by_dim[q])
            self._betti[q] = nq - self.boundary_rank(q) - self.boundary_rank(q + 1)
        return self._betti[q]

    def betti_numbers(self) -> list[int]:
        return [self.betti(q) for q in range(self.n + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * len(g) for q, g in enumerate(self._by_dim))

    def class_rank(self, q: int, chains: Sequence[Chain]) -> int:
        """Rank of the homology classes of the given q-cycles."""
        b = self.boundary_matrix(q + 1)
        cols = b.columns()
        extra = [self.chain_bits(c) for c in chains]
        width = len(self.cells_of_dim(q))
        return _kernels.rank(cols + extra, width) - _kernels.rank(cols, width)

    def cycle_basis(self, q: int, within: Iterable[str] | None = None) -> list[Chain]:
        """Basis of the q-cycles supported in ``within`` (all q-cells by default)."""
        group = self.cells_of_dim(q)
        positions = list(range(len(group))) if within is None else sorted(self._pos[c] for c in within)
        sub = self.boundary_matrix(q).submatrix(range(len(self.cells_of_dim(q - 1))), positions)
        out = []
        for v in kernel_basis(sub):
            out.append(Chain(q, frozenset(group[positions[k]] for k in v.support)))
        return out

    # -- constructions ------------------------------------------------------

    def closure(self, cells: Iterable[str]) -> set:
        seen: set = set()
        stack = []
        for c in cells:
            if c not in self._order:
                raise ComplexError(f"unknown cell {c!r}", c)
            stack.append(c)
        while stack:
            c = stack.pop()
            if c in seen:
                continue
            seen.add(c)
            stack.extend(self._boundary[c])
        return seen

    def induced_subcomplex(self, cells: Iterable[str]) -> "ChainComplex":
        """Smallest subcomplex containing ``cells`` (closure under faces)."""
        keep = self.closure(cells)
        kept = [c for c in self._cells if c.id in keep]
        return ChainComplex(kept, {c.id: self._boundary[c.id] for c in kept}, _trusted=True)

    def subcomplex(self, cells: Iterable[str]) -> "ChainComplex":
        """Subcomplex on exactly ``cells``, which must be closed under faces."""
        keep = set(cells)
        for c in keep:
            if c not in self._order:
                raise ComplexError(f"unknown cell {c!r}", c)
            missing = self._boundary[c] - keep
            if missing:
                raise ComplexError(f"face {sorted(missing)[0]!r} of {c!r} is missing", c)
        kept = [c for c in self._cells if c.id in keep]
        return ChainComplex(kept, {c.id: self._boundary[c.id] for c in kept}, _trusted=True)

    def dual(self) -> "ChainComplex":
        """Dual complex: q-cell ``a`` becomes the (n-q)-cell ``*a``; boundary is transposed."""
        n = self.n
        cells = [Cell(dual_id(c.id), n - c.dim) for c in self._cells]
        boundary = {dual_id(c.id): frozenset(dual_id(t) for t in self.cofaces(c.id)) for c in self._cells}
        return ChainComplex(cells, boundary, _trusted=True)

    def dual_chain(self, chain: Chain) -> Chain:
        """The chain of the dual complex carried by the same cells."""
        return Chain(self.n - chain.dim, frozenset(dual_id(c) for c in chain.support))


def build_from_boundary_lists(records: Iterable[tuple[str, int, Sequence[str]]]) -> ChainComplex:
    """Build a complex from ``(id, dim, boundary ids)`` triples.

    Faces may be listed in any order.  Repeated faces cancel mod 2.  Raises
    :class:`ComplexError` naming the cell on unknown ids, dimension mismatch
    or a nonzero boundary of boundary.
    """
    cells = []
    boundary = {}
    for cid, dim, faces in records:
        cells.append(Cell(str(cid), dim))
        boundary[str(cid)] = [str(f) for f in faces]
    return ChainComplex(cells, boundary)


def build_cubical(grid) -> ChainComplex:
    """Cubical complex of the nonzero pixels of a 2D array.

    Pixel ``(r, c)`` gives the square ``q{r},{c}``.  Lattice point ``(r, c)``
    is vertex ``v{r},{c}``, the edge from ``(r, c)`` to ``(r, c+1)`` is
    ``x{r},{c}`` and the edge from ``(r, c)`` to ``(r+1, c)`` is ``y{r},{c}``.
    Cells are ordered by dimension, then row-major.
    """
    rows = [list(r) for r in grid]
    if not rows or not rows[0]:
        raise ComplexError("empty grid")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ComplexError("ragged grid")
    pixels = [(r, c) for r in range(len(rows)) for c in range(width) if rows[r][c]]
    verts, xs, ys = set(), set(), set()
    for r, c in pixels:
        verts.update({(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)})
        xs.update({(r, c), (r + 1, c)})
        ys.update({(r, c), (r, c + 1)})
    records: list[tuple[str, int, list[str]]] = []
    records += [(f"v{r},{c}", 0, []) for r, c in sorted(verts)]
    edges = [(p, "x") for p in xs] + [(p, "y") for p in ys]
    for (r, c), kind in sorted(edges):
        if kind == "x":
            records.append((f"x{r},{c}", 1, [f"v{r},{c}", f"v{r},{c + 1}"]))
        else:
            records.append((f"y{r},{c}", 1, [f"v{r},{c}", f"v{r + 1},{c}"]))
    for r, c in pixels:
        records.append((f"q{r},{c}", 2, [f"x{r},{c}", f"x{r + 1},{c}", f"y{r},{c}", f"y{r},{c + 1}"]))
    return build_from_boundary_lists(records)
