import pytest

from ainfty_engine.backend.core import (Basis, Element, Generator, MultilinearOp, SignRule, compose_insert,
                                        composable, evaluate, format_element, koszul_sign)
from ainfty_engine.backend.errors import (ArityMismatch, DegreeMismatch, PositionOutOfRange, SemanticError,
                                          UnknownGenerator, WrongDegree)
from ainfty_engine.backend.fixtures import s1


def test_element_arithmetic():
    x, y = Generator("x", 1), Generator("y", 1)

    # Zero coefficients vanish
    a = Element.of(x, 2) + Element.of(y, -1)
    assert a - a == 0
    assert not (a - a)
    assert (a * 3).coefficient(x) == 6
    assert (-a).coefficient(y) == 1
    assert Element.sum([a, a, -a]) == a
    assert a.degree == 1


def test_inhomogeneous_degree_raises():
    mixed = Element.of(Generator("x", 1)) + Element.of(Generator("c", 2))
    assert not mixed.is_homogeneous()
    with pytest.raises(WrongDegree):
        mixed.degree
    assert Element().degree is None


def test_format_element_follows_basis_order():
    A = s1()
    value = Element.of(A.basis.get("c"), -1) + Element.of(A.basis.get("x"), 3)
    assert A.basis.format_element(value) == "3*x - 1*c"
    assert format_element(Element()) == "0"


def test_basis_rejects_duplicates_and_unknown_names():
    with pytest.raises(SemanticError):
        Basis([Generator("x", 1), Generator("x", 2)])
    with pytest.raises(UnknownGenerator):
        s1().basis.get("nope")


def test_evaluate_is_multilinear():
    A = s1()
    e, x, c = (A.basis.get(n) for n in ("e", "x", "c"))
    m2 = A.op(2)

    # Strict unit signs
    assert evaluate(m2, (Element.of(e), Element.of(x))) == Element.of(x, -1)
    assert evaluate(m2, (Element.of(x), Element.of(e))) == Element.of(x)

    # Linear in each slot
    arg = Element.of(x, 2) + Element.of(c)
    assert evaluate(m2, (Element.of(e), arg)) == Element.of(x, -2) + Element.of(c)
    assert m2(Element.of(e, 3), Element.of(e)) == Element.of(e, 3)


def test_evaluate_checks_arity_and_inputs():
    A = s1()
    with pytest.raises(ArityMismatch):
        evaluate(A.op(2), (Element.of(A.basis.get("e")),))
    with pytest.raises(UnknownGenerator):
        evaluate(A.op(1), (Element.of(Generator("stranger", 1)),))


def test_operation_degree_is_validated():
    x, c = Generator("x", 1), Generator("c", 2)
    with pytest.raises(DegreeMismatch):
        MultilinearOp(1, 1, {(x,): Element.of(x)})
    with pytest.raises(ArityMismatch):
        MultilinearOp(2, 0, {(x,): Element.of(c)})
    assert MultilinearOp(1, 1, {(x,): Element.of(c)})


def test_compose_insert_positions_and_signs():
    A = s1()
    e, x, c = (A.basis.get(n) for n in ("e", "x", "c"))

    # m2(m1(x), e) picks up the sign of the degree-0 input on its right
    left = compose_insert(A.op(2), A.op(1), 1)
    assert left.arity == 2
    assert evaluate(left, (Element.of(x), Element.of(e))) == Element.of(c)
    right = compose_insert(A.op(2), A.op(1), 0)
    assert evaluate(right, (Element.of(e), Element.of(x))) == Element.of(c, -1)

    # An input of degree 0 to the right of the slot flips the sign
    assert koszul_sign([0]) == -1
    assert koszul_sign([1]) == 1
    assert koszul_sign([0], SignRule.UNREDUCED) == 1
    assert koszul_sign([0, 0], SignRule.TRIVIAL) == 1

    with pytest.raises(PositionOutOfRange):
        compose_insert(A.op(2), A.op(1), 2)


def test_composable_uses_object_tags():
    f = Generator("f", 0, 0, "0", "1")
    g = Generator("g", 0, 0, "1", "2")
    assert composable((g, f))
    assert not composable((f, g))
    assert composable((Generator("x", 1), f))
