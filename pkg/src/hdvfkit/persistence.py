"""Persistent homology by completing an HDVF in filtration order.

Cells are inserted one at a time.  A new cell whose reduced boundary is zero
stays critical and opens a class; otherwise it becomes secondary, paired
with the youngest critical cell of its reduced boundary, which closes that
class.

:func:`persistence_oracle` is the textbook column reduction of the full
boundary matrix, used to cross-check diagrams.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from hdvfkit import _kernels
from hdvfkit.complex import Cell, Chain, ChainComplex, ComplexError, build_cubical
from hdvfkit.hdvf import Hdvf, Label


class FiltrationError(ComplexError):
    pass


class Filtration:
    """A face-respecting total order on the cells of a complex.

    Steps are 1-based: ``order[i - 1]`` is the cell inserted at step ``i``.
    Optional ``values`` (one per cell, by id) must be non-decreasing along
    the order; they are carried to outputs only.
    """

    def __init__(self, complex: ChainComplex, order: Sequence[str] | None = None, values=None):
        self.complex = complex
        self.order = list(complex.ids() if order is None else order)
        seen = set()
        for cid in self.order:
            if cid not in complex:
                raise FiltrationError(f"unknown cell {cid!r} in filtration order", cid)
            if cid in seen:
                raise FiltrationError(f"cell {cid!r} inserted twice", cid)
            for face in complex.sorted_ids(complex.faces(cid)):
                if face not in seen:
                    raise FiltrationError(f"face {face!r} of {cid!r} is inserted after it", cid)
            seen.add(cid)
        if len(self.order) != len(complex):
            missing = next(c for c in complex.ids() if c not in seen)
            raise FiltrationError(f"cell {missing!r} is never inserted", missing)
        self.step_of = {cid: i for i, cid in enumerate(self.order, 1)}
        self.values = None
        if values is not None:
            self.values = {cid: values[cid] for cid in self.order}
            prev = None
            for cid in self.order:
                v = self.values[cid]
                if prev is not None and v < prev:
                    raise FiltrationError(f"value of {cid!r} decreases along the order", cid)
                prev = v

    def __len__(self):
        return len(self.order)

    def cell_at(self, step: int) -> str:
        return self.order[step - 1]

    def value_at(self, step: int | None):
        if step is None:
            return None
        if self.values is None:
            return step
        return self.values[self.order[step - 1]]

    def prefix(self, step: int) -> ChainComplex:
        """The complex ``K^step`` made of the first ``step`` cells."""
        if not 0 <= step <= len(self.order):
            raise IndexError(f"step {step} outside 0..{len(self.order)}")
        return self.complex.subcomplex(self.order[:step])

    @classmethod
    def from_cells(cls, entries: Iterable[tuple[str, int, float, Sequence[str]]]) -> "Filtration":
        """From ``(id, dim, value, faces)`` records, stably sorted by value."""
        entries = sorted(entries, key=lambda e: e[2])
        cells = [Cell(str(e[0]), int(e[1])) for e in entries]
        boundary = {str(e[0]): [str(f) for f in e[3]] for e in entries}
        k = ChainComplex(cells, boundary)
        return cls(k, [c.id for c in cells], {str(e[0]): e[2] for e in entries})

    @classmethod
    def from_grid(cls, grid) -> "Filtration":
        """Lower-star filtration of a 2D grid of non-negative integers.

        Zero pixels are absent.  A pixel with value ``v`` is a square entering
        at ``v``; edges and vertices enter with their earliest square.  Ties
        go by dimension, then by cell order.
        """
        rows = [list(r) for r in grid]
        k = build_cubical(rows)
        values = {}
        for cid in reversed(k.ids()):
            if k.dim(cid) == 2:
                r, c = map(int, cid[1:].split(","))
                values[cid] = rows[r][c]
            else:
                values[cid] = min(values[t] for t in k.cofaces(cid))
        order = sorted(k.ids(), key=lambda c: (values[c], k.dim(c), k.order_of(c)))
        return cls(k, order, values)


class PersistencePoint(NamedTuple):
    q: int
    birth: int
    death: int | None


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of ``(q, birth, death)`` points; ``death is None`` stands for infinity."""

    points: tuple = ()

    def __post_init__(self):
        pts = tuple(sorted((PersistencePoint(*p) for p in self.points), key=_point_key))
        object.__setattr__(self, "points", pts)
        for p in pts:
            if p.death is not None and not p.birth < p.death:
                raise ValueError(f"point {tuple(p)} has birth >= death")

    def multiset(self) -> Counter:
        return Counter(self.points)

    def __eq__(self, other):
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def essential(self, q: int | None = None) -> list[PersistencePoint]:
        return [p for p in self.points if p.death is None and (q is None or p.q == q)]

    def in_dim(self, q: int) -> list[PersistencePoint]:
        return [p for p in self.points if p.q == q]


def _point_key(p):
    return (p.q, p.birth, float("inf") if p.death is None else p.death)


@dataclass(frozen=True)
class PersistentGenerator:
    cell: str
    q: int
    birth: int
    death: int | None
    chain: Chain


@dataclass(frozen=True)
class StepEvent:
    """What happened at one insertion step."""

    step: int
    cell: str
    partner: str | None  # the primary cell killed by this insertion, if any

    @property
    def is_birth(self) -> bool:
        return self.partner is None


@dataclass
class PersistenceResult:
    filtration: Filtration
    diagram: PersistenceDiagram
    events: list[StepEvent]
    generators: list[PersistentGenerator]
    final: Hdvf
    _steps: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.events)

    def labels_at(self, step: int) -> dict[str, Label]:
        if not 0 <= step <= len(self.events):
            raise IndexError(f"step {step} outside 0..{len(self.events)}")
        labels = {}
        for ev in self.events[:step]:
            if ev.partner is None:
                labels[ev.cell] = Label.CRITICAL
            else:
                labels[ev.cell] = Label.SECONDARY
                labels[ev.partner] = Label.PRIMARY
        return labels

    def hdvf_at(self, step: int) -> Hdvf:
        """The perfect HDVF of ``K^step`` reached after ``step`` insertions."""
        if step not in self._steps:
            self._steps[step] = Hdvf(self.filtration.prefix(step), self.labels_at(step))
        return self._steps[step]

    @property
    def steps(self) -> list[Hdvf]:
        return [self.hdvf_at(i) for i in range(len(self.events) + 1)]


def compute_persistence(f: Filtration, keep_steps: bool = False) -> PersistenceResult:
    """Insert the cells in order, pairing each new cell with the youngest
    critical cell of its reduced boundary when that boundary is nonzero.

    The reduced boundary of each new cell is read in the HDVF of the previous
    step, rebuilt on the enlarged complex.  With ``keep_steps`` every step
    HDVF is kept on the result; otherwise they are rebuilt on demand.
    """
    k = f.complex
    step_of = f.step_of
    labels: dict[str, Label] = {}
    events: list[StepEvent] = []
    death: dict[str, int] = {}
    kept = {0: Hdvf(f.prefix(0), {})} if keep_steps else {}
    for i, tau in enumerate(f.order, 1):
        labels[tau] = Label.CRITICAL
        x = Hdvf(f.prefix(i), labels)
        red = x.d(tau)
        if not red:
            events.append(StepEvent(i, tau, None))
        else:
            pi = max(red.support, key=step_of.__getitem__)
            labels[tau], labels[pi] = Label.SECONDARY, Label.PRIMARY
            death[pi] = i
            events.append(StepEvent(i, tau, pi))
            if keep_steps:
                x = x.relabel({tau: Label.SECONDARY, pi: Label.PRIMARY})
        if keep_steps:
            kept[i] = x
    final = Hdvf(k, labels)

    points = []
    gens = []
    for ev in events:
        if ev.partner is not None:
            continue
        cell = ev.cell
        d = death.get(cell)
        points.append(PersistencePoint(k.dim(cell), ev.step, d))
        gens.append(PersistentGenerator(cell, k.dim(cell), ev.step, d, final.canonical_cycle(cell)))
    return PersistenceResult(f, PersistenceDiagram(tuple(points)), events, gens, final, kept)


def persistence_oracle(f: Filtration) -> PersistenceDiagram:
    """Diagram from left-to-right reduction of the boundary matrix in filtration order."""
    k = f.complex
    step_of = f.step_of
    cols = []
    for cid in f.order:
        bits = 0
        for face in k.faces(cid):
            bits |= 1 << (step_of[face] - 1)
        cols.append(bits)
    _, lows = _kernels.reduce_columns(cols)
    killed = {low: j for j, low in enumerate(lows) if low >= 0}
    points = []
    for j, low in enumerate(lows):
        if low >= 0:
            continue
        q = k.dim(f.order[j])
        d = killed.get(j)
        points.append(PersistencePoint(q, j + 1, None if d is None else d + 1))
    return PersistenceDiagram(tuple(points))


def persistent_basis(result: PersistenceResult, step: int, q: int) -> list[Chain]:
    """Homology basis of ``K^step`` in dimension ``q`` carried by the step HDVF."""
    if not 0 <= step <= len(result):
        raise IndexError(f"step {step} outside 0..{len(result)}")
    return result.hdvf_at(step).homology_basis(q)


def check_generator_preservation(result: PersistenceResult) -> bool:
    """Every critical cell keeps the same g-image over its whole lifetime,
    equal to the final canonical cycle of that cell."""
    expected = {g.cell: g.chain for g in result.generators}
    for step in range(1, len(result) + 1):
        x = result.hdvf_at(step)
        for cell in x.critical():
            if x.g(cell) != expected.get(cell):
                return False
    return True


def diagram_values(f: Filtration, diagram: PersistenceDiagram) -> list[tuple]:
    """Points with steps replaced by filtration values (identity when none)."""
    return [(p.q, f.value_at(p.birth), f.value_at(p.death)) for p in diagram]

