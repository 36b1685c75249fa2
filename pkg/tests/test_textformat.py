import os

import pytest

from ainfty_engine.backend.core import Element
from ainfty_engine.backend.errors import SemanticError, StructureSyntaxError
from ainfty_engine.backend.fixtures import (exterior_algebra, group_ring, linear_quiver, non_associative, s1,
                                            s1_module)
from ainfty_engine.backend.homology import FiniteComplex
from ainfty_engine.backend.modcat import diagonal_bimodule
from ainfty_engine.backend.textformat import dump, load, parse, parse_expression, serialize

from conftest import FIXTURES


def read(name):
    with open(os.path.join(FIXTURES, name), encoding="utf-8") as f:
        return f.read()


def known_algebras():
    return {"S1": load(os.path.join(FIXTURES, "s1.ainf")).structure,
            "A2": load(os.path.join(FIXTURES, "a2.ainf")).structure}


@pytest.mark.parametrize("name", ["s1.ainf", "s1-mod.ainf", "zz3.ainf", "lambda2.ainf", "a2.ainf",
                                  "a2-diag.ainf", "nonassoc.ainf", "filtered.ainf"])
def test_fixture_files_round_trip(name):
    text = read(name)
    doc = parse(text, known_algebras())
    assert serialize(doc.structure, doc.cyclic, doc.name) == text


def test_programmatic_fixtures_serialize_to_files():
    assert serialize(s1()) == read("s1.ainf")
    D = s1_module()
    assert serialize(D, Element.of(D.basis.get("u"))) == read("s1-mod.ainf")
    assert serialize(group_ring(3)) == read("zz3.ainf")
    assert serialize(exterior_algebra(2)) == read("lambda2.ainf")
    assert serialize(linear_quiver(2)) == read("a2.ainf")
    assert serialize(diagonal_bimodule(linear_quiver(2))) == read("a2-diag.ainf")
    assert serialize(non_associative()) == read("nonassoc.ainf")


def test_parsed_documents():
    doc = parse(read("s1-mod.ainf"), known_algebras())
    assert doc.kind == "module"
    assert doc.kmax == 1
    assert doc.structure.algebra.name == "S1"
    assert doc.cyclic == Element.of(doc.structure.basis.get("u"))

    complex_doc = parse(read("filtered.ainf"))
    assert isinstance(complex_doc.structure, FiniteComplex)
    assert [complex_doc.structure.dimension(s) for s in (0, 1, 2)] == [1, 3, 1]


def test_comments_and_blank_lines_are_ignored():
    text = "# S1 without products\n\nalgebra tiny kmax=1  # header\ngen x deg=1 filt=1/2\n\ngen c deg=2\n" \
           "op m1: x -> 2*c\n"
    doc = parse(text)
    A = doc.structure
    assert [g.name for g in A.basis] == ["x", "c"]
    assert str(A.basis.get("x").filtration) == "1/2"
    assert A.op(1)(Element.of(A.basis.get("x"))) == Element.of(A.basis.get("c"), 2)


@pytest.mark.parametrize("text,line,column", [
    ("", 1, 1),
    ("ring R\n", 1, 1),
    ("algebra\n", 1, 8),
    ("algebra R\ngen x deg=one\n", 2, 1),
    ("algebra R\ngen x deg=1 filt=1/0\n", 2, 1),
    ("algebra R\ngen x deg=1\nop bad: x -> 1*x\n", 3, 4),
    ("algebra R\ngen x deg=1\ngen c deg=2\nop m1: x c -> 1*c\n", 4, 4),
    ("algebra R\ngen x deg=1\ngen c deg=2\nop m1: x -> 1*c +\n", 4, 17),
    ("algebra R\ngen x deg=1\nfrob x\n", 3, 1),
])
def test_syntax_errors_carry_position(text, line, column):
    with pytest.raises(StructureSyntaxError) as error:
        parse(text)
    assert error.value.line == line
    assert error.value.column == column


@pytest.mark.parametrize("text,line", [
    ("algebra R\ngen x deg=1\nop m1: x -> 1*x\n", 3),
    ("algebra R\ngen x deg=1\nop m1: y -> 1*x\n", 3),
    ("algebra R\ngen x deg=1\ngen x deg=2\n", 3),
    ("algebra R\ngen x deg=1\nunit e\n", 3),
    ("module M over=Q\ngen y deg=0\n", 1),
])
def test_semantic_errors_name_the_line(text, line):
    with pytest.raises(SemanticError) as error:
        parse(text)
    assert error.value.line == line


def test_expressions():
    basis = s1().basis
    x, c = basis.get("x"), basis.get("c")
    assert parse_expression("x", basis) == Element.of(x)
    assert parse_expression("3*x - 1*c", basis) == Element.of(x, 3) - Element.of(c)
    assert parse_expression("0", basis) == 0
    with pytest.raises(StructureSyntaxError):
        parse_expression("2*x +", basis)
    with pytest.raises(SemanticError):
        parse_expression("y", basis)


def test_dump_and_load(tmp_path):
    # Save and reload S1
    path = tmp_path / "s1.ainf"
    dump(str(path), s1())
    assert path.read_text(encoding="utf-8") == read("s1.ainf")
    assert serialize(load(str(path)).structure) == read("s1.ainf")
