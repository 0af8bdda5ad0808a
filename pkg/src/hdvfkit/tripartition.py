"""Trees, cotrees and tri-partitions, and their correspondence with perfect HDVFs.

A q-tree spans no nonzero q-cycle, a q-cotree no nonzero q-cocycle.  A
q-tri-partition splits the q-cells into a maximal cotree, a maximal tree and
``beta_q`` essential cells.  The layers ``(P_q, S_q, C_q)`` of a perfect HDVF
are tri-partitions, and any stack of tri-partitions is a perfect HDVF.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from hdvfkit import _kernels
from hdvfkit.complex import Chain, ChainComplex
from hdvfkit.hdvf import Hdvf, Label, NotPerfectError, PreconditionError
from hdvfkit.linalg import Gf2Matrix, NoSolution, scatter_bits, solve


@dataclass(frozen=True)
class TriPartition:
    q: int
    cotree: frozenset
    tree: frozenset
    essential: frozenset

    def __post_init__(self):
        for name in ("cotree", "tree", "essential"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))


class TriPartitionError(ValueError):
    pass


def _positions(k: ChainComplex, cells: Iterable[str], q: int) -> list[int]:
    out = []
    for c in cells:
        if c not in k or k.dim(c) != q:
            raise TriPartitionError(f"{c!r} is not a {q}-cell")
        out.append(k.position(c))
    return sorted(out)


def _column_rank(m: Gf2Matrix, cols: Sequence[int]) -> int:
    sub = m.submatrix(range(m.nrows), cols)
    return _kernels.rank(sub.rows, sub.ncols)


def is_tree(k: ChainComplex, cells: Iterable[str], q: int) -> bool:
    """No nonzero q-cycle is supported in ``cells``."""
    pos = _positions(k, cells, q)
    return _column_rank(k.boundary_matrix(q), pos) == len(pos)


def is_cotree(k: ChainComplex, cells: Iterable[str], q: int) -> bool:
    """No nonzero q-cocycle is supported in ``cells``."""
    pos = _positions(k, cells, q)
    return _column_rank(k.boundary_matrix(q + 1).transpose(), pos) == len(pos)


def _is_maximal(k, cells, q, test, what) -> bool:
    cells = set(cells)
    if not test(k, cells, q):
        raise PreconditionError(f"cells do not form a {q}-{what}")
    return all(not test(k, cells | {c}, q) for c in k.cells_of_dim(q) if c not in cells)


def is_maximal_tree(k: ChainComplex, cells: Iterable[str], q: int) -> bool:
    return _is_maximal(k, cells, q, is_tree, "tree")


def is_maximal_cotree(k: ChainComplex, cells: Iterable[str], q: int) -> bool:
    return _is_maximal(k, cells, q, is_cotree, "cotree")


@dataclass
class TriPartitionReport:
    valid: bool
    problems: list[str]

    def __bool__(self):
        return self.valid


def validate_tripartition(k: ChainComplex, t: TriPartition) -> TriPartitionReport:
    q = t.q
    qcells = set(k.cells_of_dim(q))
    parts = (t.cotree, t.tree, t.essential)
    union = t.cotree | t.tree | t.essential
    if sum(map(len, parts)) != len(union) or union != qcells:
        raise TriPartitionError(f"the three sets do not partition the {q}-cells")
    problems = []
    if not is_cotree(k, t.cotree, q):
        problems.append(f"cotree spans a nonzero {q}-cocycle")
    elif not is_maximal_cotree(k, t.cotree, q):
        problems.append("cotree is not maximal")
    if not is_tree(k, t.tree, q):
        problems.append(f"tree spans a nonzero {q}-cycle")
    elif not is_maximal_tree(k, t.tree, q):
        problems.append("tree is not maximal")
    beta = k.betti(q)
    if len(t.essential) != beta:
        problems.append(f"{len(t.essential)} essential cells but beta_{q} = {beta}")
    return TriPartitionReport(not problems, problems)


def hdvf_to_tripartitions(x: Hdvf) -> list[TriPartition]:
    """Layers ``(P_q, S_q, C_q)`` of a perfect HDVF, one per dimension."""
    if not x.is_perfect():
        raise NotPerfectError("tri-partition layers need a perfect HDVF")
    return [
        TriPartition(q, x.primary(q), x.secondary(q), x.critical(q)) for q in range(x.complex.n + 1)
    ]


def tripartitions_to_hdvf(k: ChainComplex, stack: Sequence[TriPartition]) -> Hdvf:
    """Union of one tri-partition per dimension as a (perfect) HDVF."""
    by_q = {}
    for t in stack:
        if t.q in by_q:
            raise TriPartitionError(f"two layers for dimension {t.q}")
        by_q[t.q] = t
    needed = set(range(k.n + 1))
    if set(by_q) != needed:
        missing = sorted(needed - set(by_q)) or sorted(set(by_q) - needed)
        raise TriPartitionError(f"stack must have exactly one layer per dimension 0..{k.n}; bad {missing}")
    labels = {}
    for q in sorted(by_q):
        t = by_q[q]
        report = validate_tripartition(k, t)
        if not report:
            raise TriPartitionError(f"layer {q} is invalid: " + "; ".join(report.problems))
        labels.update({c: Label.PRIMARY for c in t.cotree})
        labels.update({c: Label.SECONDARY for c in t.tree})
        labels.update({c: Label.CRITICAL for c in t.essential})
    return Hdvf(k, labels)


def _solve_in(m: Gf2Matrix, cols: list[int], rhs: int) -> int:
    sub = m.submatrix(range(m.nrows), cols)
    x = solve(sub, rhs)
    return scatter_bits(x.bits, cols)


def canonical_cycle_tp(k: ChainComplex, t: TriPartition, cell: str) -> Chain:
    """The unique q-cycle in ``cell + Span(tree)``."""
    if cell in t.tree:
        raise PreconditionError(f"{cell!r} belongs to the tree")
    if cell not in t.cotree and cell not in t.essential:
        raise PreconditionError(f"{cell!r} is not a {t.q}-cell of the tri-partition")
    q = t.q
    bd = k.boundary_matrix(q)
    cols = _positions(k, t.tree, q)
    rhs = bd.column(k.position(cell))
    try:
        fill = _solve_in(bd, cols, rhs)
    except NoSolution:
        raise TriPartitionError(f"no cycle in {cell!r} + Span(tree): tree is not maximal") from None
    return k.bits_chain(q, fill | (1 << k.position(cell)))


def canonical_cocycle_tp(k: ChainComplex, t: TriPartition, cell: str) -> Chain:
    """The unique q-cocycle in ``cell + Span(cotree)``."""
    if cell in t.cotree:
        raise PreconditionError(f"{cell!r} belongs to the cotree")
    if cell not in t.tree and cell not in t.essential:
        raise PreconditionError(f"{cell!r} is not a {t.q}-cell of the tri-partition")
    q = t.q
    cobd = k.boundary_matrix(q + 1).transpose()
    cols = _positions(k, t.cotree, q)
    rhs = cobd.column(k.position(cell))
    try:
        fill = _solve_in(cobd, cols, rhs)
    except NoSolution:
        raise TriPartitionError(f"no cocycle in {cell!r} + Span(cotree): cotree is not maximal") from None
    return k.bits_chain(q, fill | (1 << k.position(cell)))


def essential_basis(k: ChainComplex, t: TriPartition) -> list[Chain]:
    """Canonical cycles of the essential cells (a q-homology basis)."""
    return [canonical_cycle_tp(k, t, e) for e in k.sorted_ids(t.essential)]
