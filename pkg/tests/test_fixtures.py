import pytest

from ainfty_engine.backend.ainfty import check_relations, classical_differential, classical_product
from ainfty_engine.backend.core import Element
from ainfty_engine.backend.fixtures import (exterior_algebra, group_ring, linear_quiver, random_mc_fixture,
                                            s1_module, truncated_polynomial, with_extra_generator)


def test_exterior_algebra_products():
    A = exterior_algebra(3)
    assert len(A.basis) == 8
    x1, x2 = A.basis.get("x1"), A.basis.get("x2")
    assert classical_product(A, x1, x2) == Element.of(A.basis.get("x1x2"))
    assert classical_product(A, x2, x1) == Element.of(A.basis.get("x1x2"), -1)
    assert classical_product(A, x1, x1) == 0


def test_exterior_differential_is_a_derivation():
    A = exterior_algebra(2, [1, 1], {2: {(1, 2): 3}})
    x2 = A.basis.get("x2")
    assert classical_differential(A, x2) == Element.of(A.basis.get("x1x2"), 3)
    assert not check_relations(A, 4)


def test_small_algebras():
    Z3 = group_ring(3)
    g1, g2 = Z3.basis.get("g1"), Z3.basis.get("g2")
    assert classical_product(Z3, g2, g2) == Element.of(g1)

    Zt = truncated_polynomial(3, 2)
    t = Zt.basis.get("t")
    assert classical_product(Zt, t, t) == Element.of(Zt.basis.get("t2"))
    with pytest.raises(ValueError):
        truncated_polynomial(2, 1)

    A3 = linear_quiver(3)
    assert len(A3.basis) == 6
    assert A3.objects() == ("0", "1", "2")


def test_extra_generator_adds_a_class():
    D = s1_module()
    E = with_extra_generator(D)
    assert len(E.basis) == len(D.basis) + 1
    assert E.basis.get("z").degree == 0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_random_fixture_is_reproducible(seed):
    first, second = random_mc_fixture(seed), random_mc_fixture(seed)
    assert first.algebra.name == second.algebra.name
    assert first.b == second.b
    assert first.u == Element.of(first.module.basis.get("e"))
