import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from corpus import (
    filled_triangle,
    hollow_triangle,
    random_filtration,
    random_filtration_complex,
)
from hdvfkit.complex import build_from_boundary_lists
from hdvfkit.explicit import HomologyBasis, is_elementary, is_explicit
from hdvfkit.hdvf import Label
from hdvfkit.persistence import (
    Filtration,
    FiltrationError,
    PersistenceDiagram,
    PersistencePoint,
    check_generator_preservation,
    compute_persistence,
    diagram_values,
    persistence_oracle,
    persistent_basis,
)

HOLLOW_ORDER = ["V1", "V2", "V3", "e12", "e23", "e13"]
HOLLOW_DIAGRAM = {(0, 1, None), (0, 2, 4), (0, 3, 5), (1, 6, None)}


def hollow_run(**kw):
    return compute_persistence(Filtration(hollow_triangle(), HOLLOW_ORDER), **kw)


def as_set(diagram):
    return {tuple(p) for p in diagram}


# -- filtrations ---------------------------------------------------------------


def test_filtration_rejects_face_after_coface():
    with pytest.raises(FiltrationError) as info:
        Filtration(hollow_triangle(), ["V1", "e12", "V2", "V3", "e23", "e13"])
    assert info.value.cell == "e12"


def test_filtration_rejects_bad_orders():
    k = hollow_triangle()
    with pytest.raises(FiltrationError):
        Filtration(k, HOLLOW_ORDER[:-1])
    with pytest.raises(FiltrationError):
        Filtration(k, HOLLOW_ORDER + ["V1"])
    with pytest.raises(FiltrationError):
        Filtration(k, HOLLOW_ORDER[:-1] + ["zz"])


def test_filtration_values_monotone():
    k = hollow_triangle()
    values = dict(zip(HOLLOW_ORDER, [0, 0, 0, 1, 1, 2]))
    f = Filtration(k, HOLLOW_ORDER, values)
    assert f.value_at(6) == 2 and f.value_at(None) is None
    values["e13"] = 0
    with pytest.raises(FiltrationError):
        Filtration(k, HOLLOW_ORDER, values)


def test_from_cells_sorts_by_value():
    f = Filtration.from_cells([("e", 1, 2.0, ["a", "b"]), ("b", 0, 1.0, []), ("a", 0, 0.5, [])])
    assert f.order == ["a", "b", "e"]
    assert diagram_values(f, compute_persistence(f).diagram) == [(0, 0.5, None), (0, 1.0, 2.0)]


def test_from_grid_lower_star():
    f = Filtration.from_grid([[1, 2]])
    assert f.values["q0,0"] == 1 and f.values["q0,1"] == 2
    assert f.values["y0,1"] == 1  # shared edge enters with the earlier square
    assert [f.complex.dim(c) for c in f.order[:4]] == [0, 0, 0, 0]


def test_prefix_bounds():
    f = Filtration(hollow_triangle(), HOLLOW_ORDER)
    assert len(f.prefix(0)) == 0
    assert set(f.prefix(3).ids()) == {"V1", "V2", "V3"}
    with pytest.raises(IndexError):
        f.prefix(7)


# -- diagrams ------------------------------------------------------------------


def test_hollow_triangle_diagram():
    run = hollow_run()
    assert as_set(run.diagram) == HOLLOW_DIAGRAM
    assert len(run.diagram) == 4


def test_oracle_hollow_triangle():
    f = Filtration(hollow_triangle(), HOLLOW_ORDER)
    assert as_set(persistence_oracle(f)) == HOLLOW_DIAGRAM
    assert set(oracles.textbook_diagram(f.complex, f.order)) == HOLLOW_DIAGRAM


def test_single_vertex():
    f = Filtration(build_from_boundary_lists([("v", 0, [])]))
    assert as_set(compute_persistence(f).diagram) == {(0, 1, None)}
    assert as_set(persistence_oracle(f)) == {(0, 1, None)}


def test_filled_triangle():
    f = Filtration(filled_triangle(), HOLLOW_ORDER + ["F"])
    expected = (HOLLOW_DIAGRAM - {(1, 6, None)}) | {(1, 6, 7)}
    assert as_set(compute_persistence(f).diagram) == expected
    assert as_set(persistence_oracle(f)) == expected


def test_empty_filtration():
    f = Filtration(build_from_boundary_lists([]))
    run = compute_persistence(f, keep_steps=True)
    assert len(run.diagram) == 0
    assert check_generator_preservation(run)


def test_diagram_rejects_reversed_point():
    with pytest.raises(ValueError):
        PersistenceDiagram(((0, 3, 2),))


def test_diagram_essential_and_dims():
    d = hollow_run().diagram
    assert d.essential() == [PersistencePoint(0, 1, None), PersistencePoint(1, 6, None)]
    assert d.essential(1) == [PersistencePoint(1, 6, None)]
    assert len(d.in_dim(0)) == 3


def test_events_pair_with_youngest():
    run = hollow_run()
    partners = {ev.cell: ev.partner for ev in run.events}
    assert partners["e12"] == "V2" and partners["e23"] == "V3"
    assert partners["e13"] is None
    assert run.final.labels == {
        "V1": Label.CRITICAL, "V2": Label.PRIMARY, "V3": Label.PRIMARY,
        "e12": Label.SECONDARY, "e23": Label.SECONDARY, "e13": Label.CRITICAL,
    }  # fmt: skip


# -- persistent bases ----------------------------------------------------------


def test_persistent_basis():
    run = hollow_run()
    k = run.filtration.complex
    assert persistent_basis(run, 0, 0) == [] and persistent_basis(run, 0, 1) == []
    assert persistent_basis(run, 5, 0) == [k.chain(["V1"])]
    assert persistent_basis(run, 5, 1) == []
    assert persistent_basis(run, 6, 1) == [k.chain(["e12", "e23", "e13"])]
    with pytest.raises(IndexError):
        persistent_basis(run, 7, 0)
    with pytest.raises(IndexError):
        persistent_basis(run, -1, 0)


def test_step_hdvfs_are_perfect():
    run = hollow_run(keep_steps=True)
    for i, x in enumerate(run.steps):
        assert x.is_perfect()
        assert [len(x.critical(q)) for q in range(2)] == [
            oracles.betti(x.complex, q) if len(x.complex) else 0 for q in range(2)
        ]
        assert x == run.hdvf_at(i)


def test_generator_preservation_hollow():
    assert check_generator_preservation(hollow_run(keep_steps=True))
    assert check_generator_preservation(hollow_run())


def literal_preservation(run):
    """g is constant over each lifetime; survivors match the final canonical cycle."""
    seen = {}
    for x in run.steps:
        for cell in x.critical():
            g = x.g(cell)
            if seen.setdefault(cell, g) != g:
                return False
    final = run.final
    return all(seen[c] == final.canonical_cycle(c) for c in final.critical())


# -- oracle agreement ----------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.randoms(use_true_random=False))
def test_matches_textbook_reduction(rng):
    k = random_filtration_complex(rng)
    f = random_filtration(rng, k)
    run = compute_persistence(f)
    expected = oracles.textbook_diagram(k, f.order)
    assert run.diagram.multiset() == PersistenceDiagram(tuple(expected)).multiset()
    assert persistence_oracle(f) == run.diagram


def test_infinite_points_count_betti():
    rng = random.Random(4)
    for _ in range(30):
        k = random_filtration_complex(rng)
        run = compute_persistence(random_filtration(rng, k))
        for q in range(k.n + 1):
            assert len(run.diagram.essential(q)) == oracles.betti(k, q)


def test_generators_on_random_runs():
    rng = random.Random(6)
    for _ in range(15):
        k = random_filtration_complex(rng, 30)
        run = compute_persistence(random_filtration(rng, k), keep_steps=True)
        assert check_generator_preservation(run)
        assert literal_preservation(run)
        for gen in run.generators:
            assert k.is_cycle(gen.chain)
            assert gen.cell in gen.chain


def test_grid_filtration_matches_oracle():
    f = Filtration.from_grid([[1, 3, 1], [2, 0, 2], [1, 3, 1]])
    run = compute_persistence(f)
    assert run.diagram == persistence_oracle(f)
    assert len(run.diagram.essential(1)) == 1


@settings(max_examples=25, deadline=None)
@given(st.randoms(use_true_random=False))
def test_persistent_generators_and_bases(rng):
    k = random_filtration_complex(rng, 40)
    run = compute_persistence(random_filtration(rng, k))
    for gen in run.generators:
        assert is_elementary(k, gen.chain)
    for step in range(len(run) + 1):
        x = run.hdvf_at(step)
        assert x.is_perfect()
        for q in range(x.complex.n + 1):
            assert len(x.critical(q)) == oracles.betti(x.complex, q)
            assert is_explicit(HomologyBasis(x.complex, q, x.homology_basis(q)))


def test_points_match_critical_lifetimes():
    rng = random.Random(9)
    for _ in range(20):
        k = random_filtration_complex(rng)
        run = compute_persistence(random_filtration(rng, k))
        births = [ev for ev in run.events if ev.is_birth]
        assert len(births) == len(run.diagram) == len(run.generators)
        lifetimes = sorted((g.q, g.birth, g.death or 0) for g in run.generators)
        assert lifetimes == sorted((p.q, p.birth, p.death or 0) for p in run.diagram)
        assert len({g.cell for g in run.generators}) == len(run.generators)
