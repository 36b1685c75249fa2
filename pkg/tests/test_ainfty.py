import itertools

import pytest

from ainfty_engine.backend.ainfty import (CurvedAInfAlgebra, check_relations, check_unit, classical_product,
                                          deform, is_cohomological_unit, mc_residual, nilpotency_order)
from ainfty_engine.backend.core import Element, MultilinearOp, composable, evaluate
from ainfty_engine.backend.errors import DegreeMismatch, MissingUnit, NotNilpotent, WrongDegree
from ainfty_engine.backend.fixtures import (exterior_algebra, linear_quiver, non_associative, random_mc_fixture,
                                            relation_corpus, s1)


@pytest.mark.parametrize("algebra", relation_corpus(), ids=lambda A: A.name)
def test_corpus_satisfies_relations(algebra):
    report = check_relations(algebra)
    assert report.is_empty, [r.line() for r in report.residuals]


def test_non_associative_product_is_reported():
    A = non_associative()
    report = check_relations(A)

    # Only (a a) a differs from a (a a)
    assert len(report) == 1
    residual = report.residuals[0]
    assert [g.name for g in residual.inputs] == ["a", "a", "a"]
    assert residual.value == Element.of(A.basis.get("e"), -1)
    assert residual.line() == 'arity=3 inputs=a a a value="-1*e"'
    assert report.passing_variant is None


def test_arity_bound_hides_higher_relations():
    assert check_relations(non_associative(), max_arity=2).is_empty


def test_operation_degrees_are_validated():
    A = s1()
    e, x, c = (A.basis.get(n) for n in ("e", "x", "c"))
    with pytest.raises(DegreeMismatch):
        CurvedAInfAlgebra(A.basis, {2: MultilinearOp(2, 1, {(e, x): Element.of(c)})})
    with pytest.raises(DegreeMismatch):
        CurvedAInfAlgebra(A.basis, {1: A.op(2)})


def test_strict_units():
    assert check_unit(s1())
    assert check_unit(linear_quiver(3))
    assert check_unit(exterior_algebra(2))
    with pytest.raises(MissingUnit):
        check_unit(non_associative())


def test_cohomological_unit():
    assert is_cohomological_unit(exterior_algebra(2))
    assert is_cohomological_unit(linear_quiver(2))
    # Curved algebras have no cohomology to act on
    assert not is_cohomological_unit(s1())


def test_tagged_algebra_objects_and_units():
    A = linear_quiver(2)
    assert A.objects() == ("0", "1")
    assert A.unit_for("1").name == "e1"
    assert A.unit is None
    assert s1().objects() == (None,)
    assert s1().unit.name == "e"


def test_classical_product_undoes_reduced_signs():
    A = s1()
    e, x = A.basis.get("e"), A.basis.get("x")
    assert classical_product(A, e, x) == Element.of(x)
    assert classical_product(A, x, e) == Element.of(x)


def test_mc_residual_and_deformation_of_s1():
    A = s1()
    x, e = A.basis.get("x"), A.basis.get("e")

    # x kills the curvature
    assert mc_residual(A, Element()) == Element.of(A.basis.get("c"))
    assert mc_residual(A, Element.of(x)) == 0
    deformed = deform(A, Element.of(x))
    assert deformed.is_flat()
    assert check_relations(deformed).is_empty
    assert nilpotency_order(A, Element.of(x)) == 1

    with pytest.raises(WrongDegree):
        deform(A, Element.of(e))
    with pytest.raises(NotNilpotent):
        deform(A, Element.of(x), max_insertions=0)


@pytest.mark.parametrize("seed", range(5))
def test_deforming_back_restores_flatness(seed):
    fixture = random_mc_fixture(seed)
    C = fixture.algebra
    assert not C.is_flat()
    assert mc_residual(C, fixture.b) == 0

    restored = deform(C, fixture.b)
    assert restored.is_flat()
    assert restored.op(1) == fixture.flat.op(1)
    assert restored.op(2) == fixture.flat.op(2)


def test_mc_residual_is_exact_and_deformations_compose():
    A = s1()
    x, c = A.basis.get("x"), A.basis.get("c")
    assert mc_residual(A, Element.of(x, 2)) == Element.of(c, -1)
    assert deform(A, Element()) is A

    # Deforming by x and then by -x gives A back
    twice = deform(deform(A, Element.of(x)), Element.of(x, -1))
    for k in range(3):
        assert twice.op(k) == A.op(k)

    # Same on the random fixtures
    for seed in range(3):
        fixture = random_mc_fixture(seed)
        beta = -fixture.b
        half = deform(fixture.flat, beta * 2)
        assert deform(half, -beta).op(1) == fixture.algebra.op(1)
        assert deform(half, -beta).op(0) == fixture.algebra.op(0)


def nested_residuals(A, max_arity):
    """Relation values computed by evaluating m(..., m(...), ...) term by term."""
    found = {}
    for d in range(max_arity + 1):
        for inputs in itertools.product(A.basis, repeat=d):
            if not composable(inputs):
                continue
            args = tuple(Element.of(g) for g in inputs)
            total = Element()
            for j in range(d + 1):
                for i in range(d - j + 1):
                    right = inputs[d - i:]
                    sign = (-1) ** sum(g.degree - 1 for g in right)
                    inner = evaluate(A.op(j), args[d - i - j:d - i])
                    if not inner:
                        continue
                    outer_args = args[:d - i - j] + (inner,) + args[d - i:]
                    total = total + evaluate(A.op(d - j + 1), outer_args) * sign
            if total:
                found[inputs] = total
    return found


@pytest.mark.parametrize("algebra", relation_corpus() + [non_associative()], ids=lambda A: A.name)
def test_relations_match_nested_evaluation(algebra):
    report = check_relations(algebra, max_arity=4)
    assert {r.inputs: r.value for r in report.residuals} == nested_residuals(algebra, 4)
