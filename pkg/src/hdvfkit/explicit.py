"""Explicit homology and cohomology bases.

A q-homology basis is explicit when every generator owns a cell that no other
generator uses (a *private* cell) and the subcomplex spanned by the closure
of all generator cells has exactly as many q-holes as there are generators.
Explicit bases are exactly those carried by perfect HDVFs;
:func:`hdvf_from_explicit_basis` builds one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from hdvfkit import _kernels
from hdvfkit.complex import Chain, ChainComplex
from hdvfkit.hdvf import Hdvf, PreconditionError, complete_preserving, op_w


class BasisError(PreconditionError):
    """The chains do not form a homology basis."""


class ExplicitnessError(ValueError):
    def __init__(self, report: "ExplicitReport"):
        super().__init__(report.message)
        self.report = report


class CharacterizationLimitError(ValueError):
    pass


@dataclass
class HomologyBasis:
    """q-cycles of ``complex`` whose classes form a basis of H_q.

    Validated on construction with GF(2) ranks only.
    """

    complex: ChainComplex
    q: int
    generators: list[Chain] = field(default_factory=list)

    def __post_init__(self):
        k, q = self.complex, self.q
        self.generators = list(self.generators)
        for i, gen in enumerate(self.generators, 1):
            if gen.dim != q:
                raise BasisError(f"generator {i} has dimension {gen.dim}, expected {q}")
            unknown = [c for c in gen.support if c not in k or k.dim(c) != q]
            if unknown:
                raise BasisError(f"generator {i} uses {unknown[0]!r}, not a {q}-cell of the complex")
            if not k.is_cycle(gen):
                raise BasisError(f"generator {i} is not a cycle")
        beta = k.betti(q)
        if len(self.generators) != beta:
            raise BasisError(f"{len(self.generators)} generators for a homology group of dimension {beta}")
        if k.class_rank(q, self.generators) != beta:
            raise BasisError("generator classes are linearly dependent")

    def __len__(self):
        return len(self.generators)

    def cells(self, indices=None) -> set:
        gens = self.generators if indices is None else [self.generators[i] for i in indices]
        out: set = set()
        for g in gens:
            out |= g.support
        return out

    def induced_complex(self, indices=None) -> ChainComplex:
        return self.complex.induced_subcomplex(self.cells(indices))

    def private_cells(self) -> list[list[str]]:
        """For each generator, its cells used by no other generator (complex order)."""
        out = []
        for k, gen in enumerate(self.generators):
            others = self.cells(i for i in range(len(self.generators)) if i != k)
            out.append(self.complex.sorted_ids(gen.support - others))
        return out


@dataclass
class ExplicitReport:
    explicit: bool
    beta: int
    induced_betti: int
    private_cells: list[list[str]]
    missing_private: list[int]
    message: str

    def __bool__(self):
        return self.explicit


def is_explicit(basis: HomologyBasis) -> ExplicitReport:
    """Private cell for every generator and dim H_q(K^beta) == beta."""
    private = basis.private_cells()
    missing = [i + 1 for i, cells in enumerate(private) if not cells]
    beta = len(basis)
    induced = basis.induced_complex().betti(basis.q)
    problems = []
    if missing:
        problems.append(
            "no private cell for generator " + ", ".join(str(i) for i in missing)
            + " (its cells are covered by the other generators)"
        )
    if induced != beta:
        problems.append(f"induced complex has beta_{basis.q} = {induced}, expected {beta}")
    ok = not problems
    msg = "explicit" if ok else "not explicit: " + "; ".join(problems)
    return ExplicitReport(ok, beta, induced, private, missing, msg)


@dataclass
class CharacterizationReport:
    private_and_injective: bool
    cycles_in_span: bool
    private_and_dimension: bool

    @property
    def agree(self) -> bool:
        return self.private_and_injective == self.cycles_in_span == self.private_and_dimension

    @property
    def explicit(self) -> bool:
        if not self.agree:
            raise RuntimeError(f"characterizations disagree: {self}")
        return self.private_and_dimension


def _subsets(n):
    for r in range(n + 1):
        yield from combinations(range(n), r)


def check_characterizations(basis: HomologyBasis, limit: int = 6) -> CharacterizationReport:
    """Evaluate the three equivalent definitions of explicitness.

    The first two range over every subset J of generators (2^beta induced
    complexes), so ``beta`` is capped by ``limit``; use :func:`is_explicit`
    for larger bases.
    """
    beta = len(basis)
    if beta > limit:
        raise CharacterizationLimitError(
            f"basis has {beta} generators, above the brute-force limit {limit}; use is_explicit instead"
        )
    k, q = basis.complex, basis.q
    has_private = all(basis.private_cells())
    width = len(k.cells_of_dim(q))
    gen_bits = [k.chain_bits(g) for g in basis.generators]

    injective = True
    in_span = True
    for J in _subsets(beta):
        sub = basis.induced_complex(J)
        cycles = k.cycle_basis(q, within=sub.cells_of_dim(q))
        # sub has no (q+1)-cells, so its q-cycles are its q-homology
        dim_h = sub.betti(q)
        if dim_h != len(J) or k.class_rank(q, cycles) != len(J):
            injective = False
        span = [gen_bits[i] for i in J]
        base = _kernels.rank(span, width)
        for z in cycles:
            if _kernels.rank(span + [k.chain_bits(z)], width) != base:
                in_span = False
                break
    third = bool(is_explicit(basis))
    return CharacterizationReport(has_private and injective, in_span, third)


def is_elementary(complex: ChainComplex, chain: Chain) -> bool:
    """True iff no proper nonempty subset of the support is a cycle.

    Equivalently the cycles supported in ``chain`` form a 1-dimensional space.
    The zero chain is not elementary.
    """
    if not complex.is_cycle(chain):
        raise PreconditionError("chain is not a cycle")
    if not chain:
        return False
    return len(complex.cycle_basis(chain.dim, within=chain.support)) == 1


def hdvf_from_explicit_basis(basis: HomologyBasis) -> Hdvf:
    """A perfect HDVF whose q-homology basis is exactly ``basis.generators``.

    Grows a perfect HDVF over the complexes induced by the first k generators,
    preserving the critical cells already placed.  Each step leaves one new
    critical cell; when it is not private to the new generator, a W operation
    moves it onto the generator's lowest private cell.  The result is then
    completed to the whole complex.
    """
    report = is_explicit(basis)
    if not report.explicit:
        raise ExplicitnessError(report)
    k, q = basis.complex, basis.q
    x = Hdvf(k.induced_subcomplex(()), {})
    placed: list[str] = []
    for i, gen in enumerate(basis.generators):
        sub = basis.induced_complex(range(i + 1))
        x = complete_preserving(x, sub, placed)
        new = [c for c in x.critical(q) if c not in set(placed)]
        if len(new) != 1 or new[0] not in gen:
            raise RuntimeError(f"unexpected critical {q}-cells {new} after adding generator {i + 1}")
        tau = new[0]
        private = report.private_cells[i]
        if tau not in private:
            # move criticality onto a private cell of this generator
            x = op_w(x, [private[0]], [tau])
            tau = private[0]
        placed.append(tau)
    x = complete_preserving(x, k, placed)

    produced = x.homology_generators(q)
    for anchor, gen in zip(placed, basis.generators):
        if produced.get(anchor) != gen:
            raise RuntimeError(f"generator at {anchor!r} was not reproduced")
    return x


def generator_map(x: Hdvf, basis: HomologyBasis) -> dict[str, Chain]:
    """Critical cell -> generator, for an HDVF returned by :func:`hdvf_from_explicit_basis`."""
    gens = x.homology_generators(basis.q)
    return {c: g for c, g in gens.items() if g in basis.generators}


def cohomology_basis_on_dual(complex: ChainComplex, q: int, cochains: Sequence[Chain]) -> HomologyBasis:
    """Read q-cocycles of ``complex`` as an (n-q)-homology basis of its dual."""
    dual = complex.dual()
    return HomologyBasis(dual, complex.n - q, [complex.dual_chain(c) for c in cochains])


def is_explicit_cohomology(complex: ChainComplex, q: int, cochains: Sequence[Chain]) -> ExplicitReport:
    """A q-cohomology basis is explicit iff it is an explicit (n-q)-homology basis of the dual."""
    return is_explicit(cohomology_basis_on_dual(complex, q, cochains))
