"""
Line-oriented structure documents.

    algebra S1 kmax=2
    gen e deg=0 filt=0
    unit e
    op m2: e e -> 1*e

Modules add ``over=<algebra> side=left|right`` to the header and use
``op n<k>:`` lines; bimodules use ``left=<algebra> right=<algebra>`` and
``op n<k>,<l>:``; complexes use ``op d:``. A ``cyclic`` line stores a
module element. Serialization is canonical: generators in basis order,
operation entries by arity and then lexicographically by input tuple.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from jaraco.text import drop_comment

from .ainfty import CurvedAInfAlgebra
from .core import Basis, Element, Generator, MultilinearOp, format_element
from .errors import EngineError, SemanticError, StructureSyntaxError, UnknownGenerator
from .homology import FiniteComplex
from .modcat import LEFT, RIGHT, AInfBimodule, AInfModule

logger = logging.getLogger("TextFormat")

KINDS = ("algebra", "module", "bimodule", "complex")

Structure = Union[CurvedAInfAlgebra, AInfModule, AInfBimodule, FiniteComplex]

_TERM = re.compile(r"^(-?\d+)\*(\S+)$")
_LABEL = re.compile(r"^(m|n)(\d+)(?:,(\d+))?:$|^d:$")


@dataclass
class StructureDocument:
    kind: str
    name: str
    structure: Structure
    kmax: int = 0
    cyclic: Optional[Element] = None


@dataclass
class _Line:
    number: int
    text: str
    tokens: List[str]

    def column(self, index: int) -> int:
        """1-based column of token ``index``."""
        pos = 0
        for i, token in enumerate(self.tokens):
            pos = self.text.index(token, pos)
            if i == index:
                return pos + 1
            pos += len(token)
        return len(self.text) + 1

    def fail(self, message: str, index: int = 0):
        raise StructureSyntaxError(message, self.number, self.column(index))


def _lines(text: str) -> List[_Line]:
    found = []
    for number, raw in enumerate(text.split("\n"), 1):
        raw = raw.rstrip("\r")
        if raw.lstrip().startswith("#"):
            continue
        body = drop_comment(raw)
        if body.strip():
            found.append(_Line(number, body, body.split()))
    return found


def _options(line: _Line, start: int) -> Dict[str, str]:
    options = {}
    for i in range(start, len(line.tokens)):
        key, sep, value = line.tokens[i].partition("=")
        if not sep or not key or not value:
            line.fail(f"expected key=value, got {line.tokens[i]!r}", i)
        options[key] = value
    return options


def _integer(line: _Line, value: str, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        line.fail(f"{what} must be an integer, got {value!r}")


def _fraction(line: _Line, value: str) -> Fraction:
    if not re.fullmatch(r"-?\d+(/\d+)?", value):
        line.fail(f"filtration must be p/q, got {value!r}")
    try:
        return Fraction(value)
    except ZeroDivisionError:
        line.fail(f"filtration {value!r} has zero denominator")


def parse_element(line: _Line, tokens: Sequence[str], basis: Basis, offset: int) -> Element:
    """``3*x - 1*c`` or ``0`` over a basis."""
    if list(tokens) == ["0"]:
        return Element()
    terms = Element()
    sign = 1
    expect_term = True
    for i, token in enumerate(tokens):
        if expect_term:
            match = _TERM.match(token)
            if not match:
                line.fail(f"expected <int>*<generator>, got {token!r}", offset + i)
            try:
                g = basis.get(match.group(2))
            except UnknownGenerator as e:
                raise SemanticError(str(e), line.number, line.text.strip()) from None
            terms = terms + Element.of(g, sign * int(match.group(1)))
        else:
            if token not in "+-" or len(token) != 1:
                line.fail(f"expected + or -, got {token!r}", offset + i)
            sign = 1 if token == "+" else -1
        expect_term = not expect_term
    if expect_term:
        line.fail("element ends with a dangling sign", offset + len(tokens) - 1)
    return terms


def parse(text: str, algebras: Optional[Mapping[str, CurvedAInfAlgebra]] = None) -> StructureDocument:
    """
    Parse one structure document.

    Args:
        text: Document text
        algebras: Named algebras a module or bimodule document refers to

    Returns:
        StructureDocument

    Raises:
        StructureSyntaxError: malformed line, with line and column
        SemanticError: unknown generator, degree mismatch or missing algebra,
            with the offending line
    """
    lines = _lines(text)
    if not lines:
        raise StructureSyntaxError("empty document", 1)
    header = lines[0]
    kind = header.tokens[0]
    if kind not in KINDS:
        header.fail(f"document must start with one of {', '.join(KINDS)}")
    if len(header.tokens) < 2 or "=" in header.tokens[1]:
        header.fail("missing document name", 1)
    name = header.tokens[1]
    options = _options(header, 2)
    kmax = _integer(header, options.get("kmax", "0"), "kmax")

    generators: List[Generator] = []
    unit_names: List[Tuple[_Line, str]] = []
    op_lines: List[_Line] = []
    cyclic_line: Optional[_Line] = None
    for line in lines[1:]:
        keyword = line.tokens[0]
        if keyword == "gen":
            if len(line.tokens) < 2:
                line.fail("gen needs a symbol")
            gen_options = _options(line, 2)
            if "deg" not in gen_options:
                line.fail("gen needs deg=<int>")
            unknown = set(gen_options) - {"deg", "filt", "src", "tgt"}
            if unknown:
                line.fail(f"unknown generator option {sorted(unknown)[0]}")
            if any(g.name == line.tokens[1] for g in generators):
                raise SemanticError(f"duplicate generator {line.tokens[1]}", line.number, line.text.strip())
            generators.append(Generator(line.tokens[1], _integer(line, gen_options["deg"], "deg"),
                                        _fraction(line, gen_options.get("filt", "0")),
                                        gen_options.get("src"), gen_options.get("tgt")))
        elif keyword == "unit":
            if len(line.tokens) < 2:
                line.fail("unit needs at least one symbol")
            unit_names.extend((line, token) for token in line.tokens[1:])
        elif keyword == "op":
            op_lines.append(line)
        elif keyword == "cyclic":
            cyclic_line = line
        else:
            line.fail(f"unknown keyword {keyword!r}")
    basis = Basis(generators)

    if kind == "algebra":
        structure = _algebra(name, kmax, basis, unit_names, op_lines)
    elif kind == "module":
        structure = _module(header, name, kmax, options, basis, op_lines, algebras or {})
    elif kind == "bimodule":
        structure = _bimodule(header, name, kmax, options, basis, op_lines, algebras or {})
    else:
        structure = _complex(name, basis, op_lines)
    cyclic = None
    if cyclic_line is not None:
        cyclic = parse_element(cyclic_line, cyclic_line.tokens[1:], basis, 1)
    logger.debug(f"Parsed {kind} {name} with {len(basis)} generators and {len(op_lines)} entries")
    return StructureDocument(kind, name, structure, kmax, cyclic)


def _entries(line: _Line, pools_for, basis: Basis):
    """Split ``op <label>: <inputs> -> <element>`` into (key, inputs, output)."""
    if len(line.tokens) < 2:
        line.fail("op needs a label")
    label = _LABEL.match(line.tokens[1])
    if not label:
        line.fail(f"bad operation label {line.tokens[1]!r}", 1)
    if "->" not in line.tokens:
        line.fail("op needs '->'")
    arrow = line.tokens.index("->")
    names = line.tokens[2:arrow]
    if label.group(0) == "d:":
        key = None
    elif label.group(3) is not None:
        key = (int(label.group(2)), int(label.group(3)))
    else:
        key = int(label.group(2))
    family = label.group(1) or "d"
    pools = pools_for(family, key, line)
    if len(names) != len(pools):
        line.fail(f"{line.tokens[1]} takes {len(pools)} inputs, got {len(names)}", 1)
    inputs = []
    for name, pool in zip(names, pools):
        try:
            inputs.append(pool.get(name))
        except UnknownGenerator as e:
            raise SemanticError(str(e), line.number, line.text.strip()) from None
    output = parse_element(line, line.tokens[arrow + 1:], basis, arrow + 1)
    return key, tuple(inputs), output


def _tables(op_lines: Sequence[_Line], pools_for, basis: Basis, degree_of) -> Dict:
    tables: Dict = {}
    for line in op_lines:
        key, inputs, output = _entries(line, pools_for, basis)
        expected = sum(g.degree for g in inputs) + degree_of(key)
        for g, _ in output:
            if g.degree != expected:
                raise SemanticError(f"{g.name} has degree {g.degree}, expected {expected}",
                                    line.number, line.text.strip())
        table = tables.setdefault(key, {})
        if inputs in table:
            raise SemanticError("duplicate operation entry", line.number, line.text.strip())
        table[inputs] = output
    return tables


def _algebra(name, kmax, basis, unit_names, op_lines) -> CurvedAInfAlgebra:
    def pools_for(family, key, line):
        if family != "m" or not isinstance(key, int):
            line.fail("algebra operations are labelled m<k>:", 1)
        return (basis,) * key

    tables = _tables(op_lines, pools_for, basis, lambda k: 2 - k)
    units = []
    for line, token in unit_names:
        try:
            units.append(basis.get(token))
        except UnknownGenerator as e:
            raise SemanticError(str(e), line.number, line.text.strip()) from None
    ops = {k: MultilinearOp(k, 2 - k, table) for k, table in tables.items()}
    return CurvedAInfAlgebra(basis, ops, units, name, kmax=kmax or max(ops, default=0))


def _lookup(header: _Line, options: Mapping[str, str], key: str, algebras) -> CurvedAInfAlgebra:
    if key not in options:
        header.fail(f"header needs {key}=<algebra>")
    if options[key] not in algebras:
        raise SemanticError(f"unknown algebra {options[key]}", header.number, header.text.strip())
    return algebras[options[key]]


def _module(header, name, kmax, options, basis, op_lines, algebras) -> AInfModule:
    algebra = _lookup(header, options, "over", algebras)
    side = options.get("side", LEFT)
    if side not in (LEFT, RIGHT):
        header.fail(f"side must be left or right, got {side!r}")

    def pools_for(family, key, line):
        if family != "n" or not isinstance(key, int):
            line.fail("module operations are labelled n<k>:", 1)
        return (algebra.basis,) * key + (basis,) if side == LEFT else (basis,) + (algebra.basis,) * key

    tables = _tables(op_lines, pools_for, basis, lambda k: 1 - k)
    ops = {k: MultilinearOp(k + 1, 1 - k, table) for k, table in tables.items()}
    return AInfModule(algebra, basis, ops, side, name, kmax or max(ops, default=0))


def _bimodule(header, name, kmax, options, basis, op_lines, algebras) -> AInfBimodule:
    left = _lookup(header, options, "left", algebras)
    right = _lookup(header, options, "right", algebras)

    def pools_for(family, key, line):
        if family != "n" or not isinstance(key, tuple):
            line.fail("bimodule operations are labelled n<k>,<l>:", 1)
        k, l = key
        return (left.basis,) * k + (basis,) + (right.basis,) * l

    tables = _tables(op_lines, pools_for, basis, lambda kl: 1 - kl[0] - kl[1])
    ops = {kl: MultilinearOp(kl[0] + kl[1] + 1, 1 - kl[0] - kl[1], table) for kl, table in tables.items()}
    return AInfBimodule(left, right, basis, ops, name, kmax or max((k + l for k, l in ops), default=0))


def _complex(name, basis, op_lines) -> FiniteComplex:
    def pools_for(family, key, line):
        if family != "d":
            line.fail("complex differentials are labelled d:", 1)
        return (basis,)

    tables = _tables(op_lines, pools_for, basis, lambda _: 1)
    op = MultilinearOp(1, 1, tables.get(None, {}))
    return FiniteComplex.from_operation(basis, op, name)


def _gen_line(g: Generator) -> str:
    parts = [f"gen {g.name} deg={g.degree} filt={g.filtration}"]
    if g.source is not None:
        parts.append(f"src={g.source}")
    if g.target is not None:
        parts.append(f"tgt={g.target}")
    return " ".join(parts)


def _op_lines(label: str, op: MultilinearOp, pools: Sequence[Basis], output: Basis) -> List[str]:
    def key(item):
        return [pool.order(g) for pool, g in zip(pools, item[0])]

    lines = []
    for inputs, value in sorted(op.table.items(), key=key):
        names = "".join(f" {g.name}" for g in inputs)
        lines.append(f"op {label}:{names} -> {format_element(value, output.order)}")
    return lines


def serialize(structure: Structure, cyclic: Optional[Element] = None, name: Optional[str] = None) -> str:
    """Canonical document text, LF line endings, trailing newline."""
    name = name or structure.name or "unnamed"
    if isinstance(structure, CurvedAInfAlgebra):
        lines = [f"algebra {name} kmax={structure.kmax}"]
        lines += [_gen_line(g) for g in structure.basis]
        if structure.units:
            lines.append("unit " + " ".join(u.name for u in structure.units))
        for k in sorted(structure.ops):
            lines += _op_lines(f"m{k}", structure.ops[k], (structure.basis,) * k, structure.basis)
        basis = structure.basis
    elif isinstance(structure, AInfModule):
        lines = [f"module {name} over={structure.algebra.name} side={structure.side} kmax={structure.kmax}"]
        lines += [_gen_line(g) for g in structure.basis]
        for k in sorted(structure.ops):
            pools = structure._pools(k)
            lines += _op_lines(f"n{k}", structure.ops[k], pools, structure.basis)
        basis = structure.basis
    elif isinstance(structure, AInfBimodule):
        lines = [f"bimodule {name} left={structure.left.name} right={structure.right.name} kmax={structure.kmax}"]
        lines += [_gen_line(g) for g in structure.basis]
        for (k, l) in sorted(structure.ops):
            pools = (structure.left.basis,) * k + (structure.basis,) + (structure.right.basis,) * l
            lines += _op_lines(f"n{k},{l}", structure.ops[(k, l)], pools, structure.basis)
        basis = structure.basis
    elif isinstance(structure, FiniteComplex):
        basis = structure.generators
        lines = [f"complex {name}"]
        lines += [_gen_line(g) for g in basis]
        table = {}
        for g in basis:
            image = structure.apply(Element.of(g))
            if image:
                table[(g,)] = image
        lines += _op_lines("d", MultilinearOp(1, 1, table), (basis,), basis)
    else:
        raise EngineError(f"cannot serialize {type(structure).__name__}")
    if cyclic is not None:
        lines.append(f"cyclic {format_element(cyclic, basis.order)}")
    return "\n".join(lines) + "\n"


def load(path: str, algebras: Optional[Mapping[str, CurvedAInfAlgebra]] = None) -> StructureDocument:
    with open(path, encoding="utf-8") as f:
        return parse(f.read(), algebras)


def dump(path: str, structure: Structure, cyclic: Optional[Element] = None):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(serialize(structure, cyclic))


def parse_expression(text: str, basis: Basis) -> Element:
    """Element expression from the command line; a bare symbol means 1*symbol."""
    tokens = text.split()
    if len(tokens) == 1 and "*" not in tokens[0] and tokens[0] != "0":
        tokens = [f"1*{tokens[0]}"]
    return parse_element(_Line(0, " ".join(tokens), tokens), tokens, basis, 0)
