"""Homological discrete vector fields and their reductions.

An HDVF labels every cell primary (P), secondary (S) or critical (C) so that
the block of the boundary from secondary q-cells to primary (q-1)-cells is
invertible.  It then induces a reduction ``(f, g, h)`` onto ``(Span C, d)``::

    H = (d_SP)^-1      F = d_SC . H      G = H . d_CP      D = d_CC + d_SC . H . d_CP

(signs vanish over GF(2)).  Blocks are stored per dimension: ``H[q]`` maps
primary q-cells to secondary (q+1)-cells, ``F[q]`` primary q-cells to
critical q-cells, ``G[q]`` critical q-cells to secondary q-cells and ``D[q]``
critical q-cells to critical (q-1)-cells.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping

from hdvfkit.complex import Chain, ChainComplex, dual_id
from hdvfkit.linalg import (
    Gf2Matrix,
    SingularError,
    gather_bits,
    independent_subset,
    invert,
    iter_bits,
    scatter_bits,
)


class Label(str, enum.Enum):
    PRIMARY = "P"
    SECONDARY = "S"
    CRITICAL = "C"


P, S, C = Label.PRIMARY, Label.SECONDARY, Label.CRITICAL


class InvalidHdvf(ValueError):
    """Labels do not form an HDVF.

    ``dim`` is the dimension q of the failing block (secondary q-cells against
    primary (q-1)-cells); ``witness`` is a nonzero chain of secondary q-cells
    whose boundary vanishes on the primary cells, when the block is square.
    """

    def __init__(self, message: str, dim: int | None = None, witness: Chain | None = None):
        super().__init__(message)
        self.dim = dim
        self.witness = witness


class InvalidOperation(ValueError):
    """A W or M operation whose validity matrix is not invertible."""

    def __init__(self, message: str, witness: Chain | None = None):
        super().__init__(message)
        self.witness = witness


class PreconditionError(ValueError):
    pass


class NotPerfectError(PreconditionError):
    """The operation needs a perfect HDVF (reduced boundary d = 0)."""


@dataclass
class Reduction:
    """Full per-dimension matrices of the reduction induced by an HDVF.

    Rows and columns of ``h`` and of the chain sides of ``f``/``g`` follow the
    complex's cell order within each dimension; critical sides follow
    ``critical[q]``.  ``f[q]`` is (C_q x K_q), ``g[q]`` is (K_q x C_q),
    ``h[q]`` is (K_{q+1} x K_q) and ``d[q]`` is (C_{q-1} x C_q).
    """

    complex: ChainComplex
    critical: dict[int, tuple[str, ...]]
    f: dict[int, Gf2Matrix]
    g: dict[int, Gf2Matrix]
    h: dict[int, Gf2Matrix]
    d: dict[int, Gf2Matrix]

    def _n(self, q):
        return len(self.complex.cells_of_dim(q))

    def _c(self, q):
        return len(self.critical.get(q, ()))

    def f_(self, q):
        return self.f.get(q) or Gf2Matrix.zeros(self._c(q), self._n(q))

    def g_(self, q):
        return self.g.get(q) or Gf2Matrix.zeros(self._n(q), self._c(q))

    def h_(self, q):
        return self.h.get(q) or Gf2Matrix.zeros(self._n(q + 1), self._n(q))

    def d_(self, q):
        return self.d.get(q) or Gf2Matrix.zeros(self._c(q - 1), self._c(q))

    def axioms(self) -> dict[str, bool]:
        """Check the five reduction identities in every dimension."""
        k = self.complex
        res = dict.fromkeys(["f.bd = d.f", "bd.g = g.d", "f.h = 0", "h.g = 0", "h.h = 0", "f.g = id", "g.f = id - bd.h - h.bd"], True)
        for q in range(-1, k.n + 2):
            bq = k.boundary_matrix(q)
            b1 = k.boundary_matrix(q + 1)
            if (self.f_(q - 1) @ bq) != (self.d_(q) @ self.f_(q)):
                res["f.bd = d.f"] = False
            if (bq @ self.g_(q)) != (self.g_(q - 1) @ self.d_(q)):
                res["bd.g = g.d"] = False
            if not (self.f_(q + 1) @ self.h_(q)).is_zero():
                res["f.h = 0"] = False
            if not (self.h_(q) @ self.g_(q)).is_zero():
                res["h.g = 0"] = False
            if not (self.h_(q + 1) @ self.h_(q)).is_zero():
                res["h.h = 0"] = False
            if (self.f_(q) @ self.g_(q)) != Gf2Matrix.identity(self._c(q)):
                res["f.g = id"] = False
            rhs = Gf2Matrix.identity(self._n(q)) + b1 @ self.h_(q) + self.h_(q - 1) @ bq
            if (self.g_(q) @ self.f_(q)) != rhs:
                res["g.f = id - bd.h - h.bd"] = False
        return res


def _coerce_label(value) -> Label:
    if isinstance(value, Label):
        return value
    try:
        return Label(str(value).upper()[:1])
    except ValueError:
        raise ValueError(f"unknown label {value!r}") from None


class Hdvf:
    """A validated HDVF on a complex, with its reduction blocks.

    Construction is validation: it raises :class:`InvalidHdvf` when the
    labels do not cover the cells exactly or some secondary/primary block is
    not square and invertible.
    """

    def __init__(self, complex: ChainComplex, labels: Mapping[str, Label | str]):
        self.complex = k = complex
        self._labels = {cid: _coerce_label(v) for cid, v in labels.items()}
        extra = [c for c in self._labels if c not in k]
        if extra:
            raise InvalidHdvf(f"label for unknown cell {extra[0]!r}")
        missing = [c for c in k.ids() if c not in self._labels]
        if missing:
            raise InvalidHdvf(f"cell {missing[0]!r} has no label")

        top = k.n
        self._pos: dict[Label, list[list[int]]] = {lab: [] for lab in Label}
        self._ids: dict[Label, list[tuple[str, ...]]] = {lab: [] for lab in Label}
        for q in range(top + 1):
            group = k.cells_of_dim(q)
            for lab in Label:
                pos = [i for i, cid in enumerate(group) if self._labels[cid] is lab]
                self._pos[lab].append(pos)
                self._ids[lab].append(tuple(group[i] for i in pos))

        self.H: dict[int, Gf2Matrix] = {}
        for q in range(-1, top + 1):
            np_, ns = len(self._p(P, q)), len(self._p(S, q + 1))
            if np_ != ns:
                raise InvalidHdvf(
                    f"{ns} secondary {q + 1}-cells against {np_} primary {q}-cells: block is not square",
                    dim=q + 1,
                )
            if q < 0 or np_ == 0:
                continue
            block = k.boundary_matrix(q + 1).submatrix(self._p(P, q), self._p(S, q + 1))
            try:
                self.H[q] = invert(block)
            except SingularError as err:
                secs = self._ids[S][q + 1]
                witness = Chain(q + 1, frozenset(secs[i] for i in err.witness.support))
                raise InvalidHdvf(
                    f"boundary block from secondary {q + 1}-cells to primary {q}-cells is singular; "
                    f"witness {sorted(witness.support)}",
                    dim=q + 1,
                    witness=witness,
                ) from None

        self.F: dict[int, Gf2Matrix] = {}
        self.G: dict[int, Gf2Matrix] = {}
        self.D: dict[int, Gf2Matrix] = {}
        for q in range(top + 1):
            b1 = k.boundary_matrix(q + 1)
            bq = k.boundary_matrix(q)
            nc = len(self._p(C, q))
            if q in self.H:
                self.F[q] = b1.submatrix(self._p(C, q), self._p(S, q + 1)) @ self.H[q]
            else:
                self.F[q] = Gf2Matrix.zeros(nc, len(self._p(P, q)))
            if q - 1 in self.H:
                self.G[q] = self.H[q - 1] @ bq.submatrix(self._p(P, q - 1), self._p(C, q))
            else:
                self.G[q] = Gf2Matrix.zeros(len(self._p(S, q)), nc)
            dcc = bq.submatrix(self._p(C, q - 1), self._p(C, q))
            dsc = bq.submatrix(self._p(C, q - 1), self._p(S, q))
            self.D[q] = dcc + dsc @ self.G[q]

    # -- labels ---------------------------------------------------------------

    def _p(self, lab: Label, q: int) -> list[int]:
        if 0 <= q <= self.complex.n:
            return self._pos[lab][q]
        return []

    def _local(self, lab: Label, q: int) -> dict[str, int]:
        return {cid: i for i, cid in enumerate(self.cells(lab, q))}

    @property
    def labels(self) -> dict[str, Label]:
        return dict(self._labels)

    def label(self, cell_id: str) -> Label:
        return self._labels[cell_id]

    def cells(self, lab: Label, q: int | None = None) -> tuple[str, ...]:
        """Cells with label ``lab`` (in dimension ``q``, or all, in complex order)."""
        if q is None:
            return tuple(c for c in self.complex.ids() if self._labels[c] is lab)
        if 0 <= q <= self.complex.n:
            return self._ids[lab][q]
        return ()

    def primary(self, q: int | None = None):
        return self.cells(P, q)

    def secondary(self, q: int | None = None):
        return self.cells(S, q)

    def critical(self, q: int | None = None):
        return self.cells(C, q)

    def __eq__(self, other):
        if not isinstance(other, Hdvf):
            return NotImplemented
        return self.complex == other.complex and self._labels == other._labels

    def __repr__(self):
        counts = {lab.value: len(self.cells(lab)) for lab in Label}
        return f"Hdvf(P={counts['P']}, S={counts['S']}, C={counts['C']})"

    # -- reduction maps on chains ----------------------------------------------

    def is_perfect(self) -> bool:
        return all(m.is_zero() for m in self.D.values())

    def _check_crit(self, chain: Chain):
        for c in chain.support:
            if self._labels.get(c) is not C:
                raise ValueError(f"cell {c!r} is not critical")

    def _crit_local(self, chain: Chain) -> int:
        loc = self._local(C, chain.dim)
        return sum(1 << loc[c] for c in chain.support)

    def d(self, chain: Chain | str) -> Chain:
        """Reduced boundary of a chain of critical cells."""
        chain = self._as_chain(chain)
        self._check_crit(chain)
        q = chain.dim
        if q not in self.D:
            return Chain.zero(q - 1)
        out = self.D[q].apply(self._crit_local(chain))
        return self._crit_chain(q - 1, out)

    def _crit_chain(self, q: int, local: int) -> Chain:
        ids = self.cells(C, q)
        return Chain(q, frozenset(ids[i] for i in iter_bits(local)))

    def _as_chain(self, chain: Chain | str) -> Chain:
        if isinstance(chain, str):
            return Chain(self.complex.dim(chain), frozenset([chain]))
        return chain

    def f(self, chain: Chain | str) -> Chain:
        """Projection of a chain of K onto the critical cells."""
        chain = self._as_chain(chain)
        q = chain.dim
        bits = self.complex.chain_bits(chain)
        local = gather_bits(bits, self._p(C, q))
        if q in self.F:
            local ^= self.F[q].apply(gather_bits(bits, self._p(P, q)))
        return self._crit_chain(q, local)

    def g(self, chain: Chain | str) -> Chain:
        """Image in K of a chain of critical cells."""
        chain = self._as_chain(chain)
        self._check_crit(chain)
        q = chain.dim
        local = self._crit_local(chain)
        bits = scatter_bits(local, self._p(C, q))
        if q in self.G:
            bits |= scatter_bits(self.G[q].apply(local), self._p(S, q))
        return self.complex.bits_chain(q, bits)

    def h(self, chain: Chain | str) -> Chain:
        """Homotopy operator: q-chains to (q+1)-chains supported on secondary cells."""
        chain = self._as_chain(chain)
        q = chain.dim
        if q not in self.H:
            return Chain.zero(q + 1)
        bits = self.complex.chain_bits(chain)
        out = self.H[q].apply(gather_bits(bits, self._p(P, q)))
        return self.complex.bits_chain(q + 1, scatter_bits(out, self._p(S, q + 1)))

    def f_star(self, chain: Chain | str) -> Chain:
        """Transpose of ``f``: image of a chain of critical cells as a cochain of K."""
        chain = self._as_chain(chain)
        self._check_crit(chain)
        q = chain.dim
        local = self._crit_local(chain)
        bits = scatter_bits(local, self._p(C, q))
        if q in self.F and self.F[q].ncols:
            bits |= scatter_bits(self.F[q].T.apply(local), self._p(P, q))
        return self.complex.bits_chain(q, bits)

    def h_star(self, chain: Chain | str) -> Chain:
        """Transpose of ``h``: (q+1)-cochains to q-cochains supported on primary cells."""
        chain = self._as_chain(chain)
        q = chain.dim - 1
        if q not in self.H:
            return Chain.zero(q)
        bits = self.complex.chain_bits(chain)
        out = self.H[q].T.apply(gather_bits(bits, self._p(S, q + 1)))
        return self.complex.bits_chain(q, scatter_bits(out, self._p(P, q)))

    def _need_perfect(self):
        if not self.is_perfect():
            raise NotPerfectError("HDVF is not perfect (reduced boundary d != 0)")

    def canonical_cycle(self, chain: Chain | str) -> Chain:
        """The unique cycle in ``chain + Span S``: ``x - h(bd x)``."""
        self._need_perfect()
        chain = self._as_chain(chain)
        return chain + self.h(self.complex.boundary(chain))

    def canonical_cocycle(self, chain: Chain | str) -> Chain:
        """The unique cocycle in ``chain + Span P``: ``x - h*(cobd x)``."""
        self._need_perfect()
        chain = self._as_chain(chain)
        return chain + self.h_star(self.complex.coboundary(chain))

    def homology_generators(self, q: int) -> dict[str, Chain]:
        self._need_perfect()
        return {c: self.g(c) for c in self.critical(q)}

    def homology_basis(self, q: int) -> list[Chain]:
        """``g(gamma)`` for each critical q-cell, in cell order."""
        return list(self.homology_generators(q).values())

    def cohomology_generators(self, q: int) -> dict[str, Chain]:
        self._need_perfect()
        return {c: self.f_star(c) for c in self.critical(q)}

    def cohomology_basis(self, q: int) -> list[Chain]:
        return list(self.cohomology_generators(q).values())

    def reduction(self) -> Reduction:
        k = self.complex
        crit = {q: self.cells(C, q) for q in range(k.n + 1)}
        f, g, h, d = {}, {}, {}, {}
        for q in range(k.n + 1):
            nq = len(k.cells_of_dim(q))
            cpos, ppos, spos = self._p(C, q), self._p(P, q), self._p(S, q)
            F = self.F[q]
            f[q] = Gf2Matrix(len(cpos), nq, ((1 << cpos[i]) | scatter_bits(F.rows[i], ppos) for i in range(len(cpos))))
            Gcols = self.G[q].columns() if cpos else []
            gcols = [(1 << cpos[j]) | scatter_bits(Gcols[j], spos) for j in range(len(cpos))]
            g[q] = Gf2Matrix.from_columns(nq, gcols)
            n1 = len(k.cells_of_dim(q + 1))
            rows = [0] * n1
            if q in self.H:
                spos1 = self._p(S, q + 1)
                for i, r in enumerate(self.H[q].rows):
                    rows[spos1[i]] = scatter_bits(r, ppos)
            h[q] = Gf2Matrix(n1, nq, rows)
            d[q] = self.D[q]
        return Reduction(k, crit, f, g, h, d)

    # -- structure changes -------------------------------------------------

    def relabel(self, changes: Mapping[str, Label | str]) -> "Hdvf":
        labels = dict(self._labels)
        labels.update({c: _coerce_label(v) for c, v in changes.items()})
        return Hdvf(self.complex, labels)

    def extend(self, bigger: ChainComplex) -> "Hdvf":
        """The same HDVF seen on a supercomplex, new cells critical."""
        for cid in self.complex.ids():
            if cid not in bigger or bigger.faces(cid) != self.complex.faces(cid):
                raise PreconditionError(f"cell {cid!r} is not carried identically by the larger complex")
        labels = {cid: self._labels.get(cid, C) for cid in bigger.ids()}
        return Hdvf(bigger, labels)

    def dual(self) -> "Hdvf":
        """``(S, P, C)`` on the dual complex: primary and secondary swap roles."""
        swap = {P: S, S: P, C: C}
        return Hdvf(self.complex.dual(), {dual_id(c): swap[lab] for c, lab in self._labels.items()})


def all_critical(complex: ChainComplex) -> Hdvf:
    return Hdvf(complex, {cid: C for cid in complex.ids()})


def validate(complex: ChainComplex, labels: Mapping[str, Label | str]) -> Hdvf:
    """Check ``labels`` and return the HDVF; raises :class:`InvalidHdvf` otherwise."""
    return Hdvf(complex, labels)


def _group_by_dim(x: Hdvf, cells: Iterable[str]) -> dict[int, list[str]]:
    out: dict[int, list[str]] = {}
    for c in x.complex.sorted_ids(set(cells)):
        out.setdefault(x.complex.dim(c), []).append(c)
    return out


def _swap(x: Hdvf, old, old_label: Label, gamma, block, name: str, witness_on_gamma: bool) -> Hdvf:
    old, gamma = set(old), set(gamma)
    for c in old:
        if x.label(c) is not old_label:
            raise PreconditionError(f"{name}: cell {c!r} is not {old_label.name.lower()}")
    for c in gamma:
        if x.label(c) is not C:
            raise PreconditionError(f"{name}: cell {c!r} is not critical")
    if not old and not gamma:
        return x
    by_old, by_gamma = _group_by_dim(x, old), _group_by_dim(x, gamma)
    for q in sorted(set(by_old) | set(by_gamma)):
        o, g = by_old.get(q, []), by_gamma.get(q, [])
        if len(o) != len(g):
            raise PreconditionError(f"{name}: {len(o)} vs {len(g)} cells in dimension {q}")
        m = block(q, o, g)
        try:
            invert(m)
        except SingularError as err:
            cols = g if witness_on_gamma else o
            witness = Chain(q, frozenset(cols[i] for i in err.witness.support))
            raise InvalidOperation(
                f"{name}: validity matrix is singular in dimension {q}; witness {sorted(witness.support)}",
                witness=witness,
            ) from None
    changes = {c: C for c in old}
    changes.update({c: old_label for c in gamma})
    return x.relabel(changes)


def op_w(x: Hdvf, sigma: Iterable[str], gamma: Iterable[str]) -> Hdvf:
    """W operation: secondary cells ``sigma`` become critical, critical ``gamma`` secondary.

    Valid iff the matrix of ``<g(gamma_j), sigma_i>`` is invertible.
    """

    def block(q, sig, gam):
        srows = x._local(S, q)
        ccols = x._local(C, q)
        return x.G[q].submatrix([srows[s] for s in sig], [ccols[c] for c in gam])

    return _swap(x, sigma, S, gamma, block, "W", witness_on_gamma=True)


def op_m(x: Hdvf, pi: Iterable[str], gamma: Iterable[str]) -> Hdvf:
    """M operation: primary cells ``pi`` become critical, critical ``gamma`` primary.

    Valid iff the matrix of ``<f(pi_j), gamma_i>`` is invertible.
    """

    def block(q, pis, gam):
        crows = x._local(C, q)
        pcols = x._local(P, q)
        return x.F[q].submatrix([crows[c] for c in gam], [pcols[p] for p in pis])

    return _swap(x, pi, P, gamma, block, "M", witness_on_gamma=False)


def _first_unpaired(x: Hdvf) -> tuple[str, str] | None:
    """Lowest critical cell with nonzero reduced boundary, and the lowest cell of that boundary."""
    k = x.complex
    best = None
    for q, m in x.D.items():
        if m.is_zero():
            continue
        crit, below = x.critical(q), x.critical(q - 1)
        for j, col in enumerate(m.columns()):
            if col:
                cand = (crit[j], below[next(iter_bits(col))])
                if best is None or k.order_of(cand[0]) < k.order_of(best[0]):
                    best = cand
                break
    return best


def complete(x: Hdvf) -> Hdvf:
    """Pair critical cells until the HDVF is perfect.

    Rule: take the lowest critical cell (complex order) with nonzero reduced
    boundary, make it secondary and make the lowest cell of its reduced
    boundary primary, then rebuild the reduction and repeat.
    """
    while True:
        pair = _first_unpaired(x)
        if pair is None:
            return x
        sigma, pi = pair
        x = x.relabel({sigma: S, pi: P})


def complete_preserving(x: Hdvf, bigger: ChainComplex, c_star: Iterable[str]) -> Hdvf:
    """Perfect HDVF on ``bigger`` keeping P, S and the critical cells ``c_star``.

    ``x`` must be perfect and the homology classes in ``bigger`` of
    ``g(gamma)``, gamma in ``c_star``, linearly independent.  Steps: complete
    the extended HDVF, then undo with an M operation the pairings that made
    cells of ``c_star`` primary, trading them for other critical cells
    selected by lowest-index elimination.
    """
    if not x.is_perfect():
        raise NotPerfectError("complete_preserving needs a perfect HDVF")
    c_star = x.complex.sorted_ids(set(c_star))
    dims = {x.complex.dim(c) for c in c_star}
    if len(dims) > 1:
        raise PreconditionError("preserved critical cells must share one dimension")
    for c in c_star:
        if x.label(c) is not C:
            raise PreconditionError(f"cell {c!r} is not critical")
    extended = x.extend(bigger)
    if c_star:
        q = dims.pop()
        gens = [x.g(c) for c in c_star]
        if bigger.class_rank(q, gens) != len(gens):
            raise PreconditionError(
                f"homology classes of the generators of {c_star} are dependent in the larger complex"
            )
    full = complete(extended)
    if not c_star:
        return full
    lost = [c for c in c_star if full.label(c) is P]
    if any(full.label(c) is S for c in c_star):  # excluded by the generator argument
        raise RuntimeError("a preserved critical cell became secondary")
    if not lost:
        return full
    keep = set(c_star)
    candidates = [c for c in full.critical(q) if c not in keep]
    crow = full._local(C, q)
    pcol = full._local(P, q)
    m = full.F[q].submatrix([crow[c] for c in candidates], [pcol[p] for p in lost])
    rows = independent_subset(m.rows)
    gamma = [candidates[i] for i in rows]
    if len(gamma) != len(lost):
        raise RuntimeError("no invertible square submatrix for the M operation")
    return op_m(full, lost, gamma)
