import pytest

from ainfty_engine.backend.ainfty import from_dga
from ainfty_engine.backend.core import Basis, Element, Generator
from ainfty_engine.backend.errors import NotDG
from ainfty_engine.backend.fixtures import (conjugated_yoneda, exterior_algebra, linear_quiver, random_mc_fixture,
                                            s1, s1_module, truncated_polynomial, with_extra_generator)
from ainfty_engine.backend.homology import cohomology
from ainfty_engine.backend.modcat import (HomComplex, bimodule_to_functor, check_bimodule_relations,
                                          check_module_relations, check_module_unit, deform_module,
                                          diagonal_bimodule, hom_differential, is_dga_isomorphism,
                                          is_representable_on_object, lambda_chain_map, lambda_is_quasi_iso,
                                          lambda_map, tensor_dg, tensor_swap, yoneda_left, yoneda_right)


@pytest.mark.parametrize("algebra", [exterior_algebra(2), linear_quiver(3), truncated_polynomial(3)],
                         ids=lambda A: A.name)
def test_yoneda_modules_of_flat_algebras(algebra):
    for Y in algebra.objects():
        assert check_module_relations(yoneda_left(algebra, Y)).is_empty
        assert check_module_relations(yoneda_right(algebra, Y)).is_empty
        assert check_module_unit(yoneda_left(algebra, Y))


def test_yoneda_module_of_curved_algebra_is_curved_consistent():
    report = check_module_relations(yoneda_left(s1()))
    assert report.is_empty
    assert report.curved_consistent


def test_s1_module_relations_and_unit():
    D = s1_module()
    assert check_module_relations(D).is_empty
    assert check_module_unit(D)

    # Deforming by the bounding cochain gives a dg module
    x = Element.of(D.algebra.basis.get("x"))
    deformed = deform_module(D, x)
    assert deformed.algebra.is_flat()
    assert check_module_relations(deformed).is_empty


@pytest.mark.parametrize("seed", range(4))
def test_deformed_modules_over_curved_algebras(seed):
    fixture = random_mc_fixture(seed)
    assert check_module_relations(fixture.module).is_empty


@pytest.mark.parametrize("algebra", [s1(), linear_quiver(2), exterior_algebra(2)], ids=lambda A: A.name)
def test_diagonal_bimodule_relations(algebra):
    assert check_bimodule_relations(diagonal_bimodule(algebra)).is_empty


def test_functor_of_diagonal_bimodule():
    functor = bimodule_to_functor(diagonal_bimodule(linear_quiver(2)))
    assert sorted(functor.modules) == ["0", "1"]
    assert functor.order_one_residuals() == {}


@pytest.mark.parametrize("n", [2, 3])
def test_lambda_is_quasi_iso_on_directed_quivers(n):
    A = linear_quiver(n)
    for Y in A.objects():
        M = yoneda_left(A, Y)
        chain_map = lambda_chain_map(M, Y, 2)
        chain_map.check()
        assert lambda_is_quasi_iso(M, Y, 2)


def test_lambda_of_cocycle_is_closed():
    A = linear_quiver(3)
    M = conjugated_yoneda(A, "0", seed=3)
    assert check_module_relations(M).is_empty
    for c in M.at("0"):
        T = lambda_map(M, "0", Element.of(c), 2)
        assert not hom_differential(T, 2)


def test_hom_complex_squares_to_zero():
    A = linear_quiver(3)
    hom = HomComplex(yoneda_left(A, "0"), yoneda_left(A, "1"), 2)
    hom.complex.check()
    # No paths run from 1 back to 0
    assert cohomology(hom.complex).is_acyclic()


@pytest.mark.parametrize("seed", range(3))
def test_conjugated_yoneda_is_representable(seed):
    A = linear_quiver(3)
    result = is_representable_on_object(conjugated_yoneda(A, "1", seed), "1")
    assert result
    assert result.witness is not None


def test_representability_failures():
    A = linear_quiver(3)
    assert is_representable_on_object(yoneda_left(A, "2"), "2")

    # An extra generator changes the cohomology ranks
    padded = with_extra_generator(yoneda_left(A, "1"))
    result = is_representable_on_object(padded, "1")
    assert not result
    assert result.reason.startswith("homology differs")

    assert is_representable_on_object(yoneda_left(s1()), None).reason == "algebra is curved"


def test_tensor_swap_is_isomorphism():
    A, B = exterior_algebra(1), truncated_polynomial(2)
    assert is_dga_isomorphism(tensor_dg(A, B), tensor_dg(B, A), tensor_swap(A, B))

    AA = tensor_dg(A, A)
    swap = tensor_swap(A, A)
    assert is_dga_isomorphism(AA, AA, swap)

    # Without the Koszul sign the swap is not multiplicative
    unsigned = {g: Element({h: abs(c) for h, c in value}) for g, value in swap.items()}
    assert not is_dga_isomorphism(AA, AA, unsigned)


def test_tensor_swap_with_bar_in_generator_names():
    e, pq = Generator("e", 0), Generator("p|q", 1)
    product = {(e, e): Element.of(e), (e, pq): Element.of(pq), (pq, e): Element.of(pq)}
    A = from_dga(Basis([e, pq]), product, {}, [e], None, "Bar")
    B = exterior_algebra(1)
    AB, BA = tensor_dg(A, B), tensor_dg(B, A)

    swap = tensor_swap(A, B)
    assert is_dga_isomorphism(AB, BA, swap)
    assert swap[AB.basis.get("p|q|x1")] == Element.of(BA.basis.get("x1|p|q"), -1)
    assert swap[AB.basis.get("p|q|e")] == Element.of(BA.basis.get("e|p|q"))


def test_tensor_requires_dgas():
    with pytest.raises(NotDG):
        tensor_dg(s1(), exterior_algebra(1))
