"""Acceptance criteria 1-11, one PASS/FAIL line each.

Run with pytest (lines are repeated in the terminal summary) or directly::

    python3 tests/test_acceptance.py
"""

from __future__ import annotations

import random
import sys
import time
from collections import Counter
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from corpus import (  # noqa: E402
    KITE_LABELS,
    kite_complex,
    filled_triangle,
    grow_random_hdvf,
    hollow_triangle,
    three_squares,
    subsumed_basis,
    three_squares_middle_filled,
    wide_basis,
    quotient_surface,
    random_complex,
    random_filtration,
    random_filtration_complex,
    random_perfect_hdvf,
)
from hdvfkit.complex import Chain  # noqa: E402
from hdvfkit.explicit import (  # noqa: E402
    ExplicitnessError,
    HomologyBasis,
    check_characterizations,
    hdvf_from_explicit_basis,
    is_explicit,
    is_explicit_cohomology,
)
from hdvfkit.hdvf import Hdvf, all_critical, complete  # noqa: E402
from hdvfkit.linalg import Gf2Matrix  # noqa: E402
from hdvfkit.persistence import (  # noqa: E402
    Filtration,
    compute_persistence,
    persistence_oracle,
)
from hdvfkit.tripartition import (  # noqa: E402
    canonical_cycle_tp,
    hdvf_to_tripartitions,
    is_maximal_cotree,
    is_maximal_tree,
    tripartitions_to_hdvf,
    validate_tripartition,
)

RESULTS: dict[int, str] = {}
SURFACES = {"torus": [1, 2, 1], "klein": [1, 2, 1], "rp2": [1, 1, 1]}


class Check:
    """Collects failures; ``ok`` is true when none were recorded."""

    def __init__(self):
        self.failures: list[str] = []
        self.count = 0

    def __call__(self, cond, what):
        self.count += 1
        if not cond and len(self.failures) < 5:
            self.failures.append(what)
        elif not cond:
            self.failures.append("")
        return cond

    @property
    def ok(self):
        return not self.failures

    def detail(self, extra=""):
        if self.ok:
            return extra
        shown = "; ".join(f for f in self.failures if f)
        return f"{len(self.failures)} failures: {shown}"


def random_corpus(seed, count, maker=random_complex):
    rng = random.Random(seed)
    return rng, [maker(rng) for _ in range(count)]


# -- criteria --------------------------------------------------------------------


def kite_blocks():
    t0 = time.perf_counter()
    check = Check()
    k = kite_complex()
    x = Hdvf(k, KITE_LABELS)
    check(x.H[0] == Gf2Matrix.identity(2), "H0 is not I2")
    check(x.primary(0) == ("B", "C") and x.secondary(1) == ("a", "b"), "H0 rows/cols")
    check(x.H[1] == Gf2Matrix.identity(1), "H1 is not [1]")
    check(x.critical(0) == ("A", "D") and x.critical(1) == ("d", "e"), "critical cells")
    check(x.D[1] == Gf2Matrix.from_dense([[1, 1], [1, 1]]), "d1 differs")
    check(x.D[0].is_zero() and x.D[2].is_zero(), "d0 or d2 nonzero")
    check(x.D[1].apply(0b11) == 0, "d+e not in ker d1")
    check(oracles.rank(x.D[1].to_dense()) == 1, "ker d1 is not one-dimensional")
    check(oracles.betti(k, 1) == 1 and k.betti(1) == 1, "beta1 != 1")
    elapsed = time.perf_counter() - t0
    check(elapsed < 1.0, f"took {elapsed:.2f}s")
    return check.ok, check.detail(f"{elapsed * 1000:.0f} ms")


def reduction_axioms():
    t0 = time.perf_counter()
    check = Check()
    rng, complexes = random_corpus(101, 200)
    for i, k in enumerate(complexes):
        red = grow_random_hdvf(rng, k).reduction()
        failed = [name for name, ok in red.axioms().items() if not ok]
        check(not failed, f"complex {i}: {failed}")
        check(oracles.literal_reduction_axioms(red, k.n), f"complex {i}: dense identities")
    elapsed = time.perf_counter() - t0
    check(elapsed < 30.0, f"took {elapsed:.1f}s")
    return check.ok, check.detail(f"{len(complexes)} complexes, {elapsed:.1f}s")


def perfectness_and_betti():
    check = Check()
    rng, complexes = random_corpus(102, 200)
    named = [(f"random {i}", k) for i, k in enumerate(complexes)]
    for kind, expected in SURFACES.items():
        k = quotient_surface(kind)
        check(oracles.betti_vector(k) == expected, f"{kind}: oracle Betti {oracles.betti_vector(k)}")
        named.append((kind, k))
    for name, k in named:
        for start in (all_critical(k), grow_random_hdvf(rng, k)):
            y = complete(start)
            check(all(y.D[q].is_zero() for q in range(k.n + 1)), f"{name}: d != 0")
            sizes = [len(y.critical(q)) for q in range(k.n + 1)]
            check(sizes == oracles.betti_vector(k), f"{name}: |C| {sizes}")
    return check.ok, check.detail(f"{len(named)} complexes")


def _boundary_bits(k, q, cells, index):
    bits = 0
    for c in cells:
        for f in k.faces(c):
            bits ^= 1 << index[f]
    return bits


def canonical_cycle_uniqueness():
    check = Check()
    rng, complexes = random_corpus(103, 40)
    tested = 0
    for i, k in enumerate(complexes):
        x = random_perfect_hdvf(rng, k)
        for q in range(k.n + 1):
            sec = list(x.secondary(q))
            cells = list(k.cells_of_dim(q))
            if not cells or len(sec) > 12:
                continue
            index = {c: j for j, c in enumerate(k.cells_of_dim(q - 1))} if q > 0 else {}
            # every element of Span S, keyed by its boundary
            span_by_bd: dict[int, list[frozenset]] = {}
            for mask in range(1 << len(sec)):
                sub = frozenset(s for j, s in enumerate(sec) if mask >> j & 1)
                span_by_bd.setdefault(_boundary_bits(k, q, sub, index), []).append(sub)
            for _ in range(50):
                support = {c for c in cells if rng.random() < 0.5}
                target = _boundary_bits(k, q, support, index)
                cycles = [frozenset(support ^ sub) for sub in span_by_bd.get(target, [])]
                z = x.canonical_cycle(Chain.from_cells(q, support))
                check(cycles == [z.support], f"complex {i} q={q}: {len(cycles)} cycles in coset")
                tested += 1
    check(tested >= 50 * len(complexes), f"only {tested} chains tested")
    return check.ok, check.detail(f"{tested} chains on {len(complexes)} complexes")


def _suite_perfect_hdvfs(seed, count):
    rng, complexes = random_corpus(seed, count)
    out = [random_perfect_hdvf(rng, k) for k in complexes]
    out += [complete(all_critical(quotient_surface(kind))) for kind in SURFACES]
    out.append(complete(all_critical(kite_complex())))
    return out


def hdvf_bases_are_explicit():
    check = Check()
    bases = brute = 0
    for i, x in enumerate(_suite_perfect_hdvfs(104, 120)):
        k = x.complex
        for q in range(k.n + 1):
            basis = HomologyBasis(k, q, x.homology_basis(q))
            bases += 1
            check(is_explicit(basis).explicit, f"hdvf {i} q={q}: {is_explicit(basis).message}")
            if len(basis) <= 5:
                rep = check_characterizations(basis, limit=5)
                check(rep.agree and rep.private_and_dimension, f"hdvf {i} q={q}: {rep}")
                brute += 1
    return check.ok, check.detail(f"{bases} bases, {brute} brute-forced")


def _independently_explicit(k, q, gens):
    supports = [set(g.support) for g in gens]
    if oracles.class_rank(k, q, supports) != len(gens) or len(gens) != oracles.betti(k, q):
        return False
    for i, s in enumerate(supports):
        others = set().union(*(t for j, t in enumerate(supports) if j != i))
        if not s - others:
            return False
    induced = k.induced_subcomplex(set().union(*supports)) if supports else k.induced_subcomplex([])
    return oracles.betti(induced, q) == len(gens)


def explicit_round_trip():
    check = Check()
    harvested = 0
    for i, x in enumerate(_suite_perfect_hdvfs(105, 80)):
        k = x.complex
        for q in range(k.n + 1):
            gens = x.homology_basis(q)
            if not gens:
                continue
            check(_independently_explicit(k, q, gens), f"hdvf {i} q={q}: harvested basis not explicit")
            y = hdvf_from_explicit_basis(HomologyBasis(k, q, gens))
            harvested += 1
            check(y.is_perfect(), f"hdvf {i} q={q}: result not perfect")
            produced = y.homology_basis(q)
            check(Counter(produced) == Counter(gens), f"hdvf {i} q={q}: basis changed")
    check(harvested >= 50, f"only {harvested} bases")
    return check.ok, check.detail(f"{harvested} bases")


def non_explicit_rejection():
    check = Check()
    k = three_squares()
    basis = HomologyBasis(k, 1, subsumed_basis(k))
    rep = is_explicit(basis)
    check(not rep.explicit and rep.missing_private == [3], f"three squares: {rep.message}")
    check(rep.induced_betti == 3, "subsumed basis should fail only on the private cell")
    try:
        hdvf_from_explicit_basis(basis)
        check(False, "subsumed basis accepted by the round trip")
    except ExplicitnessError:
        pass
    k = three_squares_middle_filled()
    rep = is_explicit(HomologyBasis(k, 1, wide_basis(k)))
    check(not rep.explicit and not rep.missing_private, f"middle filled: {rep.message}")
    check(rep.induced_betti == 3 and "beta_1 = 3, expected 2" in rep.message, f"middle filled: {rep.message}")
    for name, make, pick in (
        ("three squares", three_squares, subsumed_basis),
        ("middle filled", three_squares_middle_filled, wide_basis),
    ):
        k = make()
        rep = check_characterizations(HomologyBasis(k, 1, pick(k)))
        check(rep.agree and not rep.explicit, f"{name}: characterizations {rep}")
    return check.ok, check.detail("subsumed generator lacks a private cell, wide basis has 3 holes")


def tripartition_correspondence():
    check = Check()
    hdvfs = _suite_perfect_hdvfs(106, 100)
    for i, x in enumerate(hdvfs):
        k = x.complex
        stack = hdvf_to_tripartitions(x)
        for t in stack:
            q = t.q
            check(validate_tripartition(k, t).valid, f"hdvf {i} layer {q} invalid")
            rest = [c for c in k.cells_of_dim(q) if c not in t.tree]
            check(
                is_maximal_tree(k, t.tree, q) and all(
                    oracles.rank([oracles.chain_column(k, q - 1, k.faces(c)) for c in [*t.tree, extra]])
                    <= len(t.tree) for extra in rest
                ),
                f"hdvf {i} layer {q}: tree not maximal",
            )
            check(is_maximal_cotree(k, t.cotree, q), f"hdvf {i} layer {q}: cotree not maximal")
            tp = [canonical_cycle_tp(k, t, e) for e in k.sorted_ids(t.essential)]
            check(tp == x.homology_basis(q), f"hdvf {i} layer {q}: canonical cycles differ")
        y = tripartitions_to_hdvf(k, stack)
        check(y.labels == x.labels, f"hdvf {i}: stack labels differ")
    return check.ok, check.detail(f"{len(hdvfs)} HDVFs")


def _diagram_tuples(diagram):
    return Counter(tuple(p) for p in diagram)


def persistence_equivalence():
    t0 = time.perf_counter()
    check = Check()
    f = Filtration(hollow_triangle(), ["V1", "V2", "V3", "e12", "e23", "e13"])
    expected = Counter([(0, 1, None), (0, 2, 4), (0, 3, 5), (1, 6, None)])
    check(_diagram_tuples(compute_persistence(f).diagram) == expected, "hollow triangle diagram")
    rng, complexes = random_corpus(107, 100, random_filtration_complex)
    for i, k in enumerate(complexes):
        f = random_filtration(rng, k)
        mine = _diagram_tuples(compute_persistence(f).diagram)
        check(mine == Counter(oracles.textbook_diagram(k, f.order)), f"filtration {i}: textbook differs")
        check(mine == _diagram_tuples(persistence_oracle(f)), f"filtration {i}: oracle differs")
    elapsed = time.perf_counter() - t0
    check(elapsed < 60.0, f"took {elapsed:.1f}s")
    return check.ok, check.detail(f"{len(complexes)} filtrations, {elapsed:.1f}s")


def generator_preservation():
    check = Check()
    rng, complexes = random_corpus(108, 60, random_filtration_complex)
    complexes.append(filled_triangle())
    for i, k in enumerate(complexes):
        run = compute_persistence(random_filtration(rng, k), keep_steps=True)
        seen = {}
        for step, x in enumerate(run.steps):
            for cell in x.critical():
                g = x.g(cell)
                check(seen.setdefault(cell, g) == g, f"run {i}: g({cell}) changes at step {step}")
        for cell in run.final.critical():
            check(seen[cell] == run.final.canonical_cycle(cell), f"run {i}: survivor {cell} drifts")
    return check.ok, check.detail(f"{len(complexes)} runs")


def duality():
    check = Check()
    hdvfs = _suite_perfect_hdvfs(109, 120)
    for i, x in enumerate(hdvfs):
        k, n = x.complex, x.complex.n
        y = x.dual()
        check(y.is_perfect(), f"hdvf {i}: dual not perfect")
        r, rd = x.reduction(), y.reduction()
        for q in range(n + 1):
            check(rd.f_(n - q) == r.g_(q).transpose(), f"hdvf {i}: f/g transpose q={q}")
            check(rd.g_(n - q) == r.f_(q).transpose(), f"hdvf {i}: g/f transpose q={q}")
            check(rd.h_(n - q) == r.h_(q - 1).transpose(), f"hdvf {i}: h transpose q={q}")
            cocycles = x.cohomology_basis(q)
            check(all(oracles.is_cocycle(k, q, c.support) for c in cocycles), f"hdvf {i}: f* not cocycles")
            check(is_explicit_cohomology(k, q, cocycles).explicit, f"hdvf {i}: cohomology q={q}")
    return check.ok, check.detail(f"{len(hdvfs)} HDVFs")


CRITERIA = [
    (1, "kite complex blocks", kite_blocks),
    (2, "reduction identities", reduction_axioms),
    (3, "perfectness and Betti numbers", perfectness_and_betti),
    (4, "canonical cycle uniqueness", canonical_cycle_uniqueness),
    (5, "HDVF bases are explicit", hdvf_bases_are_explicit),
    (6, "explicit basis round trip", explicit_round_trip),
    (7, "non-explicit rejection", non_explicit_rejection),
    (8, "tri-partition correspondence", tripartition_correspondence),
    (9, "persistence oracle equivalence", persistence_equivalence),
    (10, "generator preservation", generator_preservation),
    (11, "duality", duality),
]


def run_criterion(number, title, fn):
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, reported on the line
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f" ({detail})" if detail else "")
    RESULTS[number] = line
    print(line)
    return ok, line


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"c{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn):
    ok, line = run_criterion(number, title, fn)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c)[0] for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
