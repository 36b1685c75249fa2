"""
Graded sparse linear algebra over the integers.
Provides generators, elements, multilinear operations and the Koszul sign
bookkeeping shared by algebras, modules and bimodules.
"""

import enum
import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import (Callable, Dict, Iterable, Iterator, List, Mapping, Optional,
                    Sequence, Tuple, Union)

from jaraco.collections import FrozenDict
from jaraco.functools import apply
from more_itertools import pairwise, powerset

from .errors import (ArityMismatch, DegreeMismatch, PositionOutOfRange,
                     SemanticError, UnknownGenerator, WrongDegree)

logger = logging.getLogger("Core")


@dataclass(frozen=True, repr=False)
class Generator:
    """
    Named basis element.

    Args:
        name: Symbol, unique within its basis
        degree: Cohomological degree
        filtration: Action level (exact rational)
        source: Optional source object tag
        target: Optional target object tag
    """
    name: str
    degree: int
    filtration: Fraction = Fraction(0)
    source: Optional[str] = None
    target: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "filtration", Fraction(self.filtration))

    def __repr__(self):
        return self.name

    @property
    def reduced_degree(self) -> int:
        return self.degree - 1

    def renamed(self, name: str) -> "Generator":
        return replace(self, name=name)


def composable(inputs: Sequence[Generator]) -> bool:
    """Consecutive inputs (left, right) compose when right.target equals left.source."""
    for left, right in pairwise(inputs):
        if left.source is not None and right.target is not None and left.source != right.target:
            return False
    return True


class Element:
    """Sparse integer combination of generators. Zero coefficients are never stored."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Generator, int]] = None):
        self._terms = FrozenDict({g: int(c) for g, c in (terms or {}).items() if c})

    @classmethod
    def of(cls, generator: Generator, coefficient: int = 1) -> "Element":
        return cls({generator: coefficient})

    @classmethod
    def zero(cls) -> "Element":
        return cls()

    @classmethod
    def sum(cls, elements: Iterable["Element"]) -> "Element":
        acc = defaultdict(int)
        for element in elements:
            for g, c in element:
                acc[g] += c
        return cls(acc)

    @property
    def terms(self) -> Mapping[Generator, int]:
        return self._terms

    @property
    def support(self) -> Tuple[Generator, ...]:
        return tuple(self._terms)

    def coefficient(self, generator: Generator) -> int:
        return self._terms.get(generator, 0)

    def __iter__(self) -> Iterator[Tuple[Generator, int]]:
        return iter(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __contains__(self, generator):
        return generator in self._terms

    def __add__(self, other: "Element") -> "Element":
        acc = dict(self._terms)
        for g, c in other:
            acc[g] = acc.get(g, 0) + c
        return Element(acc)

    def __neg__(self) -> "Element":
        return Element({g: -c for g, c in self})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __mul__(self, scalar: int) -> "Element":
        return Element({g: c * scalar for g, c in self})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self._terms
        if not isinstance(other, Element):
            return NotImplemented
        return dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return format_element(self)

    def is_homogeneous(self) -> bool:
        return len({g.degree for g in self._terms}) <= 1

    @property
    def degree(self) -> Optional[int]:
        """Common degree of all terms; None for zero."""
        degrees = {g.degree for g in self._terms}
        if len(degrees) > 1:
            raise WrongDegree(f"element {self} is not homogeneous")
        return next(iter(degrees), None)

    def min_filtration(self) -> Optional[Fraction]:
        return min((g.filtration for g in self._terms), default=None)

    def project(self, keep: Callable[[Generator], bool]) -> "Element":
        return Element({g: c for g, c in self if keep(g)})


def format_element(element: Element, order: Optional[Callable[[Generator], object]] = None) -> str:
    """Canonical text form, e.g. ``3*x - 1*c``; ``0`` for the zero element."""
    key = order or (lambda g: g.name)
    parts = []
    for g, c in sorted(element, key=lambda item: key(item[0])):
        if not parts:
            parts.append(f"{c}*{g.name}")
        elif c > 0:
            parts.append(f"+ {c}*{g.name}")
        else:
            parts.append(f"- {-c}*{g.name}")
    return " ".join(parts) if parts else "0"


class Basis:
    """
    Ordered generator sequence with unique names.
    The order is used for serialization and for triangular solving.
    """

    def __init__(self, generators: Iterable[Generator] = ()):
        self._generators = tuple(generators)
        self._index = {}
        for i, g in enumerate(self._generators):
            if g.name in self._index:
                raise SemanticError(f"duplicate generator {g.name}")
            self._index[g.name] = i

    def __iter__(self):
        return iter(self._generators)

    def __len__(self):
        return len(self._generators)

    def __getitem__(self, key: Union[int, str]) -> Generator:
        if isinstance(key, str):
            return self.get(key)
        return self._generators[key]

    def __contains__(self, generator) -> bool:
        i = self._index.get(getattr(generator, "name", None))
        return i is not None and self._generators[i] == generator

    def __eq__(self, other):
        return isinstance(other, Basis) and self._generators == other._generators

    def __hash__(self):
        return hash(self._generators)

    def __repr__(self):
        return f"Basis({list(self._generators)})"

    @property
    def generators(self) -> Tuple[Generator, ...]:
        return self._generators

    def get(self, name: str) -> Generator:
        try:
            return self._generators[self._index[name]]
        except KeyError:
            raise UnknownGenerator(f"unknown generator {name}") from None

    def index(self, generator: Generator) -> int:
        if generator not in self:
            raise UnknownGenerator(f"{generator.name} is not in this basis")
        return self._index[generator.name]

    def order(self, generator: Generator):
        """Sort key following basis order; unknown generators sort last by name."""
        i = self._index.get(generator.name)
        return (0, i, "") if i is not None else (1, 0, generator.name)

    def levels(self) -> Tuple[Fraction, ...]:
        return tuple(sorted({g.filtration for g in self._generators}))

    def degrees(self) -> Tuple[int, ...]:
        return tuple(sorted({g.degree for g in self._generators}))

    def objects(self) -> Tuple[str, ...]:
        tags = {t for g in self._generators for t in (g.source, g.target) if t is not None}
        return tuple(sorted(tags))

    def of_degree(self, degree: int) -> "Basis":
        return self.restrict(lambda g: g.degree == degree)

    def restrict(self, keep: Callable[[Generator], bool]) -> "Basis":
        return Basis(g for g in self._generators if keep(g))

    def format_element(self, element: Element) -> str:
        return format_element(element, self.order)

    def vector(self, element: Element) -> List[int]:
        vec = [0] * len(self)
        for g, c in element:
            vec[self.index(g)] = c
        return vec

    def element(self, vector: Sequence[int]) -> Element:
        return Element({g: int(c) for g, c in zip(self._generators, vector)})


class SignRule(enum.Enum):
    """
    Koszul sign rules.
    REDUCED is the engine convention; the other two only serve to diagnose
    tables written in a different convention.
    """
    REDUCED = "reduced"
    UNREDUCED = "unreduced"
    TRIVIAL = "trivial"


def koszul_sign(prefix_degrees: Iterable[int], rule: SignRule = SignRule.REDUCED) -> int:
    """
    Sign for an insertion with the given inputs to its right.

    Args:
        prefix_degrees: Degrees of the inputs right of the insertion point
        rule: Sign rule

    Returns:
        (-1) ** sum(|a| - 1) under the reduced rule
    """
    if rule is SignRule.TRIVIAL:
        return 1
    shift = 1 if rule is SignRule.REDUCED else 0
    return -1 if sum(d - shift for d in prefix_degrees) % 2 else 1


Inputs = Tuple[Generator, ...]


class MultilinearOp:
    """
    Sparse multilinear operation of one arity and one intrinsic degree.
    Tuples missing from the table evaluate to zero.
    """

    __slots__ = ("arity", "intrinsic_degree", "table", "slots")

    def __init__(self, arity: int, intrinsic_degree: int,
                 table: Optional[Mapping[Inputs, Element]] = None,
                 slots: Optional[Sequence[Basis]] = None):
        self.arity = arity
        self.intrinsic_degree = intrinsic_degree
        self.slots = tuple(slots) if slots is not None else None
        clean = {}
        for inputs, output in (table or {}).items():
            inputs = tuple(inputs)
            if len(inputs) != arity:
                raise ArityMismatch(f"table key {inputs} has {len(inputs)} entries, expected {arity}")
            if not output:
                continue
            expected = sum(g.degree for g in inputs) + intrinsic_degree
            for g, _ in output:
                if g.degree != expected:
                    raise DegreeMismatch(
                        f"entry {inputs} -> {output}: {g.name} has degree {g.degree}, expected {expected}")
            clean[inputs] = output
        self.table = FrozenDict(clean)

    @classmethod
    def zero(cls, arity: int, intrinsic_degree: int, slots=None) -> "MultilinearOp":
        return cls(arity, intrinsic_degree, {}, slots)

    def __call__(self, *args: Element) -> Element:
        return evaluate(self, args)

    def __bool__(self):
        return bool(self.table)

    def __len__(self):
        return len(self.table)

    def __eq__(self, other):
        if not isinstance(other, MultilinearOp):
            return NotImplemented
        return (self.arity, self.intrinsic_degree, dict(self.table)) == \
            (other.arity, other.intrinsic_degree, dict(other.table))

    def __repr__(self):
        return f"MultilinearOp(arity={self.arity}, degree={self.intrinsic_degree}, entries={len(self.table)})"

    def __add__(self, other: "MultilinearOp") -> "MultilinearOp":
        if other.arity != self.arity:
            raise ArityMismatch(f"cannot add arity {self.arity} and {other.arity}")
        if other and self and other.intrinsic_degree != self.intrinsic_degree:
            raise DegreeMismatch("cannot add operations of different intrinsic degree")
        table = dict(self.table)
        for inputs, output in other.table.items():
            table[inputs] = table[inputs] + output if inputs in table else output
        degree = self.intrinsic_degree if self else other.intrinsic_degree
        return MultilinearOp(self.arity, degree, table, self.slots or other.slots)

    def scaled(self, scalar: int) -> "MultilinearOp":
        return MultilinearOp(self.arity, self.intrinsic_degree,
                             {k: v * scalar for k, v in self.table.items()}, self.slots)

    def restricted(self, keep: Callable[[Inputs], bool]) -> "MultilinearOp":
        return MultilinearOp(self.arity, self.intrinsic_degree,
                             {k: v for k, v in self.table.items() if keep(k)}, self.slots)

    def with_slots(self, slots: Sequence[Basis]) -> "MultilinearOp":
        return MultilinearOp(self.arity, self.intrinsic_degree, self.table, slots)

    def filtration_violations(self) -> List[Tuple[Inputs, Generator]]:
        """Entries whose output sits below the sum of the input filtrations."""
        bad = []
        for inputs, output in self.table.items():
            floor = sum((g.filtration for g in inputs), Fraction(0))
            bad.extend((inputs, g) for g, _ in output if g.filtration < floor)
        return bad

    def entries(self, order: Optional[Callable[[Generator], object]] = None) -> List[Tuple[Inputs, Element]]:
        """Table entries sorted lexicographically by input tuple."""
        key = order or (lambda g: g.name)
        return sorted(self.table.items(), key=lambda item: [key(g) for g in item[0]])


def evaluate(op: MultilinearOp, args: Sequence[Element]) -> Element:
    """
    Multilinear extension of the table.

    Args:
        op: Operation
        args: One element per input slot

    Returns:
        Exact integer result
    """
    if len(args) != op.arity:
        raise ArityMismatch(f"operation of arity {op.arity} applied to {len(args)} arguments")
    if op.slots is not None:
        for basis, arg in zip(op.slots, args):
            for g, _ in arg:
                if g not in basis:
                    raise UnknownGenerator(f"{g.name} is not an input of this operation")
    supports = [arg.terms for arg in args]
    acc = defaultdict(int)
    if math.prod(len(s) for s in supports) <= len(op.table):
        for combo in itertools.product(*(s.items() for s in supports)):
            output = op.table.get(tuple(g for g, _ in combo))
            if output is None:
                continue
            coeff = math.prod(c for _, c in combo)
            for g, c in output:
                acc[g] += coeff * c
    else:
        for inputs, output in op.table.items():
            coeff = 1
            for g, support in zip(inputs, supports):
                c = support.get(g)
                if not c:
                    break
                coeff *= c
            else:
                for g, c in output:
                    acc[g] += coeff * c
    return Element(acc)


def compose_insert(outer: MultilinearOp, inner: MultilinearOp, position: int,
                   rule: SignRule = SignRule.REDUCED) -> MultilinearOp:
    """
    Insert ``inner`` into ``outer``.

    Args:
        outer: Outer operation
        inner: Inner operation
        position: Number of outer inputs right of the inserted output
        rule: Sign rule applied to the inputs right of the insertion

    Returns:
        The operation (..., inner(...), a_n, ..., a_1) with arity
        outer.arity + inner.arity - 1
    """
    if not 0 <= position <= outer.arity - 1:
        raise PositionOutOfRange(f"position {position} outside 0..{outer.arity - 1}")
    slot = outer.arity - 1 - position
    producers = defaultdict(list)
    for inputs, output in inner.table.items():
        for g, c in output:
            producers[g].append((inputs, c))
    table = defaultdict(lambda: defaultdict(int))
    for outer_inputs, value in outer.table.items():
        sources = producers.get(outer_inputs[slot])
        if not sources:
            continue
        prefix = outer_inputs[slot + 1:]
        sign = koszul_sign((g.degree for g in prefix), rule)
        head = outer_inputs[:slot]
        for inner_inputs, c in sources:
            bucket = table[head + inner_inputs + prefix]
            for g, v in value:
                bucket[g] += sign * c * v
    slots = None
    if outer.slots is not None and inner.slots is not None:
        slots = outer.slots[:slot] + inner.slots + outer.slots[slot + 1:]
    return MultilinearOp(outer.arity + inner.arity - 1,
                         outer.intrinsic_degree + inner.intrinsic_degree,
                         {k: Element(v) for k, v in table.items()}, slots)


@dataclass(frozen=True)
class TypedOp:
    """
    Operation with typed input slots.

    Slot kinds name where an input comes from ("a" algebra, "m" module,
    "l"/"r" left/right algebra of a bimodule); ``output`` is the kind produced.
    """
    op: MultilinearOp
    kinds: Tuple[str, ...]
    output: str


def insertion_residuals(outers: Sequence[TypedOp], inners: Sequence[TypedOp],
                        accept: Callable[[Tuple[str, ...]], bool],
                        rule: SignRule = SignRule.REDUCED) -> Dict[Tuple[str, ...], MultilinearOp]:
    """
    Sum every kind-compatible insertion of an inner operation into an outer one.

    Args:
        outers: Operations receiving an inserted output
        inners: Operations being inserted
        accept: Filter on the slot kinds of the composite
        rule: Sign rule

    Returns:
        Composite slot kinds -> summed operation
    """
    sums: Dict[Tuple[str, ...], MultilinearOp] = {}
    for outer in outers:
        if not outer.op:
            continue
        for position in range(outer.op.arity):
            slot = outer.op.arity - 1 - position
            for inner in inners:
                if inner.output != outer.kinds[slot] or not inner.op:
                    continue
                kinds = outer.kinds[:slot] + inner.kinds + outer.kinds[slot + 1:]
                if not accept(kinds):
                    continue
                term = compose_insert(outer.op, inner.op, position, rule)
                sums[kinds] = sums[kinds] + term if kinds in sums else term
    return sums


def insert_elements(ops: Sequence[TypedOp], insertions: Mapping[str, Element]
                    ) -> Tuple[Dict[Tuple[str, ...], MultilinearOp], int]:
    """
    Fill any subset of slots with degree-1 elements and sum.

    Args:
        ops: Typed operations
        insertions: Slot kind -> element inserted into slots of that kind

    Returns:
        (kept slot kinds -> summed operation, largest number of insertions
        that contributed a nonzero term)
    """
    tables = defaultdict(lambda: defaultdict(lambda: defaultdict(int)))
    degrees = {}
    depth = 0
    for typed in ops:
        op = typed.op
        for inputs, value in op.table.items():
            fillable = [i for i, g in enumerate(inputs)
                        if typed.kinds[i] in insertions and insertions[typed.kinds[i]].coefficient(g)]
            for filled in powerset(fillable):
                coeff = math.prod(insertions[typed.kinds[i]].coefficient(inputs[i]) for i in filled)
                kept = [i for i in range(op.arity) if i not in filled]
                kinds = tuple(typed.kinds[i] for i in kept)
                bucket = tables[kinds][tuple(inputs[i] for i in kept)]
                for g, c in value:
                    bucket[g] += coeff * c
                degrees[kinds] = op.intrinsic_degree + len(filled)
                depth = max(depth, len(filled))
    result = {}
    for kinds, table in tables.items():
        result[kinds] = MultilinearOp(len(kinds), degrees[kinds], {k: Element(v) for k, v in table.items()})
    return result, depth


@apply(tuple)
def composable_tuples(pools: Sequence[Sequence[Generator]]) -> Iterator[Inputs]:
    """Composable input tuples drawn slot by slot from the given pools."""
    for inputs in itertools.product(*pools):
        if composable(inputs):
            yield inputs
