import random

import pytest

import oracles
from corpus import (
    HOLLOW_PERFECT_LABELS,
    kite_complex,
    figure_eight,
    filled_triangle,
    hollow_squares,
    hollow_triangle,
    three_squares,
    subsumed_basis,
    three_squares_middle_filled,
    wide_basis,
    random_complex,
    random_perfect_hdvf,
    square,
)
from hdvfkit.complex import Chain
from hdvfkit.explicit import (
    BasisError,
    CharacterizationLimitError,
    ExplicitnessError,
    HomologyBasis,
    check_characterizations,
    cohomology_basis_on_dual,
    generator_map,
    hdvf_from_explicit_basis,
    is_elementary,
    is_explicit,
    is_explicit_cohomology,
)
from hdvfkit.hdvf import Hdvf, PreconditionError


def triangle_basis():
    k = hollow_triangle()
    return HomologyBasis(k, 1, [k.chain(["e12", "e23", "e13"])])


def four_squares():
    k = hollow_squares(2, 2)
    return k, [square(k, r, c) for r in range(2) for c in range(2)]


# -- HomologyBasis validation --------------------------------------------------


def test_basis_rejects_non_cycle():
    k = hollow_triangle()
    with pytest.raises(BasisError, match="not a cycle"):
        HomologyBasis(k, 1, [k.chain(["e12"])])


def test_basis_rejects_wrong_count_and_dependence():
    k = three_squares()
    a, b, c = (square(k, 0, i) for i in range(3))
    with pytest.raises(BasisError):
        HomologyBasis(k, 1, [a, b])
    with pytest.raises(BasisError, match="dependent"):
        HomologyBasis(k, 1, [a, b, a + b])


def test_basis_rejects_boundary_generator():
    k = filled_triangle()
    with pytest.raises(BasisError):
        HomologyBasis(k, 1, [k.chain(["e12", "e23", "e13"])])


def test_basis_error_is_precondition_error():
    assert issubclass(BasisError, PreconditionError)


# -- is_explicit ---------------------------------------------------------------


def test_triangle_basis_explicit():
    report = is_explicit(triangle_basis())
    assert report and report.induced_betti == 1
    assert report.private_cells == [["e12", "e23", "e13"]]


def test_subsumed_generator_rejected():
    k = three_squares()
    report = is_explicit(HomologyBasis(k, 1, subsumed_basis(k)))
    assert not report
    assert report.missing_private == [3]
    assert "generator 3" in report.message


def test_three_squares_explicit_alternative():
    k = three_squares()
    a, b, c = (square(k, 0, i) for i in range(3))
    assert is_explicit(HomologyBasis(k, 1, [a, b + c, c]))


def test_extra_hole_in_induced_complex_rejected():
    k = three_squares_middle_filled()
    report = is_explicit(HomologyBasis(k, 1, wide_basis(k)))
    assert not report
    assert not report.missing_private
    assert report.induced_betti == 3
    assert "beta_1 = 3, expected 2" in report.message
    assert oracles.betti(HomologyBasis(k, 1, wide_basis(k)).induced_complex(), 1) == 3


def test_empty_basis_on_contractible_complex():
    k = filled_triangle()
    assert is_explicit(HomologyBasis(k, 1, []))


# -- characterizations ---------------------------------------------------------


def test_characterizations_agree_on_fixtures():
    assert check_characterizations(triangle_basis()).explicit is True
    k = three_squares()
    rep = check_characterizations(HomologyBasis(k, 1, subsumed_basis(k)))
    assert rep.agree and rep.explicit is False
    k = three_squares_middle_filled()
    rep = check_characterizations(HomologyBasis(k, 1, wide_basis(k)))
    assert rep.agree and rep.explicit is False
    rep = check_characterizations(HomologyBasis(filled_triangle(), 1, []))
    assert rep.agree and rep.explicit is True


def test_characterization_limit():
    k, gens = four_squares()
    with pytest.raises(CharacterizationLimitError, match="is_explicit"):
        check_characterizations(HomologyBasis(k, 1, gens), limit=3)
    assert check_characterizations(HomologyBasis(k, 1, gens), limit=4).explicit


def test_characterizations_on_random_perfect_hdvfs():
    rng = random.Random(21)
    checked = 0
    for _ in range(60):
        k = random_complex(rng)
        x = random_perfect_hdvf(rng, k)
        for q in range(k.n + 1):
            basis = HomologyBasis(k, q, x.homology_basis(q))
            if len(basis) <= 5:
                rep = check_characterizations(basis)
                assert rep.agree and rep.explicit
                checked += 1
    assert checked > 60


# -- elementary cycles ---------------------------------------------------------


def test_elementary():
    k = hollow_triangle()
    assert is_elementary(k, k.chain(["e12", "e23", "e13"]))
    assert not is_elementary(k, Chain.zero(1))
    with pytest.raises(PreconditionError):
        is_elementary(k, k.chain(["e12"]))


def test_figure_eight_not_elementary():
    k = figure_eight()
    both = k.chain(k.cells_of_dim(1))
    assert k.is_cycle(both)
    assert not is_elementary(k, both)


# -- explicit basis to HDVF ----------------------------------------------------


def test_round_trip_triangle():
    basis = triangle_basis()
    x = hdvf_from_explicit_basis(basis)
    assert x.is_perfect()
    assert x.homology_basis(1) == basis.generators


def test_round_trip_four_holes():
    k, gens = four_squares()
    basis = HomologyBasis(k, 1, gens)
    x = hdvf_from_explicit_basis(basis)
    assert x.is_perfect()
    mapping = generator_map(x, basis)
    assert sorted(map(sorted, mapping.values())) == sorted(map(sorted, gens))
    for cell, gen in mapping.items():
        assert x.g(cell) == gen


def test_round_trip_mixed_four_holes():
    k, (a, b, c, d) = four_squares()
    gens = [a + b, b, c + d, d]
    basis = HomologyBasis(k, 1, gens)
    report = is_explicit(basis)
    if not report:
        pytest.skip(report.message)
    x = hdvf_from_explicit_basis(basis)
    assert set(generator_map(x, basis).values()) == set(gens)


def test_round_trip_rejects_non_explicit():
    k = three_squares()
    with pytest.raises(ExplicitnessError) as info:
        hdvf_from_explicit_basis(HomologyBasis(k, 1, subsumed_basis(k)))
    assert info.value.report.missing_private == [3]


def test_round_trip_empty_basis():
    x = hdvf_from_explicit_basis(HomologyBasis(filled_triangle(), 1, []))
    assert x.is_perfect()
    assert [len(x.critical(q)) for q in range(3)] == [1, 0, 0]


def test_round_trip_random():
    rng = random.Random(5)
    for _ in range(25):
        k = random_complex(rng)
        src = random_perfect_hdvf(rng, k)
        for q in range(k.n + 1):
            gens = src.homology_basis(q)
            basis = HomologyBasis(k, q, gens)
            x = hdvf_from_explicit_basis(basis)
            assert x.is_perfect()
            assert set(generator_map(x, basis).values()) == set(gens)


# -- cohomology ----------------------------------------------------------------


def test_triangle_cohomology_explicit():
    x = Hdvf(hollow_triangle(), HOLLOW_PERFECT_LABELS)
    cocycle = x.f_star("e13")
    assert oracles.is_cocycle(x.complex, 1, cocycle.support)
    assert is_explicit_cohomology(x.complex, 1, [cocycle])


def test_cohomology_basis_lives_on_dual():
    k = kite_complex()
    basis = cohomology_basis_on_dual(k, 0, [k.chain(k.cells_of_dim(0))])
    assert basis.q == 2 and basis.complex == k.dual()
    assert is_explicit(basis)


def test_dual_subsumed_basis_not_explicit():
    # cochains on the dual read back as the subsumed basis
    k = three_squares()
    dual = k.dual()
    cochains = [k.dual_chain(g) for g in subsumed_basis(k)]
    assert all(dual.is_cocycle(c) for c in cochains)
    report = is_explicit_cohomology(dual, 0, cochains)
    assert not report and report.missing_private == [3]


def test_empty_cohomology_basis():
    k = filled_triangle()
    assert is_explicit_cohomology(k, 1, [])
