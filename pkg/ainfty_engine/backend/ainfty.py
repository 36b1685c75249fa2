"""
Curved A-infinity algebras.
Relation checking, strict and cohomological units, deformation by
Maurer-Cartan elements and the Maurer-Cartan residual.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .core import (Basis, Element, Generator, MultilinearOp, SignRule, TypedOp,
                   composable, evaluate, format_element, insert_elements,
                   insertion_residuals)
from .errors import (DegreeMismatch, MissingUnit, NotNilpotent, RelationFailure,
                     UnknownGenerator, WrongDegree)
from .homology import block_models

logger = logging.getLogger("AInfty")


class CurvedAInfAlgebra:
    """
    Finite-rank curved A-infinity algebra.

    Args:
        basis: Generators, possibly tagged with source/target objects
        ops: Arity -> operation m^k of intrinsic degree 2 - k
        units: Strict units, at most one per object
        name: Document name
        kmax: Support bound; defaults to the largest arity given
    """

    def __init__(self, basis: Basis, ops: Mapping[int, MultilinearOp],
                 units: Sequence[Generator] = (), name: str = "", kmax: Optional[int] = None):
        self.basis = basis
        self.name = name
        self.units = tuple(units)
        self.kmax = kmax if kmax is not None else max(ops, default=0)
        self.ops: Dict[int, MultilinearOp] = {}
        for k, op in sorted(ops.items()):
            if op.arity != k:
                raise DegreeMismatch(f"m{k} has arity {op.arity}")
            if op and op.intrinsic_degree != 2 - k:
                raise DegreeMismatch(f"m{k} has intrinsic degree {op.intrinsic_degree}, expected {2 - k}")
            for inputs, output in op.table.items():
                for g in inputs + output.support:
                    if g not in basis:
                        raise UnknownGenerator(f"{g.name} in m{k} is not a generator of {name or 'the algebra'}")
            if op:
                self.ops[k] = MultilinearOp(k, 2 - k, op.table, (basis,) * k)
        for unit in self.units:
            if unit not in basis:
                raise UnknownGenerator(f"unit {unit.name} is not a generator")

    def __repr__(self):
        return f"CurvedAInfAlgebra({self.name!r}, rank={len(self.basis)}, arities={sorted(self.ops)})"

    def op(self, k: int) -> MultilinearOp:
        return self.ops.get(k) or MultilinearOp.zero(k, 2 - k, (self.basis,) * k)

    @property
    def curvature(self) -> Element:
        return self.op(0).table.get((), Element())

    @property
    def unit(self) -> Optional[Generator]:
        return self.units[0] if len(self.units) == 1 else None

    def is_flat(self) -> bool:
        return not self.curvature

    def objects(self) -> Tuple[Optional[str], ...]:
        return self.basis.objects() or (None,)

    def unit_for(self, obj: Optional[str]) -> Optional[Generator]:
        for unit in self.units:
            if unit.source == obj and unit.target == obj:
                return unit
        return None

    def typed_ops(self) -> List[TypedOp]:
        return [TypedOp(op, ("a",) * k, "a") for k, op in self.ops.items()]

    def with_ops(self, ops: Mapping[int, MultilinearOp], name: Optional[str] = None) -> "CurvedAInfAlgebra":
        return CurvedAInfAlgebra(self.basis, ops, self.units, self.name if name is None else name, self.kmax)

    def filtration_violations(self):
        return [(k, inputs, g) for k, op in self.ops.items() for inputs, g in op.filtration_violations()]


def from_dga(basis: Basis, product: Mapping[Tuple[Generator, Generator], Element],
             differential: Optional[Mapping[Generator, Element]] = None,
             units: Sequence[Generator] = (), curvature: Optional[Element] = None,
             name: str = "") -> CurvedAInfAlgebra:
    """
    Reduced-sign operations of a classical (curved) dga.

    Args:
        basis: Generators
        product: (a2, a1) -> a2 * a1 in the classical sign convention
        differential: a -> da
        units: Strict units
        curvature: Optional degree-2 element used as m^0

    Returns:
        Algebra with m1(a) = (-1)^|a| da and m2(a2, a1) = (-1)^|a1| a2 a1
    """
    m1 = {(a,): value * (-1) ** a.degree for a, value in (differential or {}).items()}
    m2 = {(a2, a1): value * (-1) ** a1.degree for (a2, a1), value in product.items()}
    ops = {1: MultilinearOp(1, 1, m1), 2: MultilinearOp(2, 0, m2)}
    if curvature:
        ops[0] = MultilinearOp(0, 2, {(): curvature})
    return CurvedAInfAlgebra(basis, ops, units, name, kmax=2)


def classical_product(A: CurvedAInfAlgebra, a2: Generator, a1: Generator) -> Element:
    return evaluate(A.op(2), (Element.of(a2), Element.of(a1))) * (-1) ** a1.degree


def classical_differential(A: CurvedAInfAlgebra, a: Generator) -> Element:
    return evaluate(A.op(1), (Element.of(a),)) * (-1) ** a.degree


@dataclass(frozen=True)
class Residual:
    """Nonzero value of one relation on one input tuple."""
    arity: Tuple[int, ...]
    inputs: Tuple[Generator, ...]
    value: Element

    def line(self, order=None) -> str:
        label = ",".join(str(a) for a in self.arity)
        inputs = " ".join(g.name for g in self.inputs) or "-"
        return f"arity={label} inputs={inputs} value=\"{format_element(self.value, order)}\""


@dataclass(frozen=True)
class RelationReport:
    """
    Residuals of the curved relations.

    ``curved_consistent`` collects residuals that equal the pattern expected
    from a curved algebra acting on a module; ``passing_variant`` names a
    diagnostic sign rule under which the structure would have passed.
    """
    residuals: Tuple[Residual, ...] = ()
    curved_consistent: Tuple[Residual, ...] = ()
    passing_variant: Optional[SignRule] = None

    @property
    def is_empty(self) -> bool:
        return not self.residuals

    def __bool__(self):
        return bool(self.residuals)

    def __len__(self):
        return len(self.residuals)

    def lookup(self, arity: Tuple[int, ...], inputs: Tuple[Generator, ...]) -> Element:
        for residual in self.residuals:
            if residual.arity == arity and residual.inputs == inputs:
                return residual.value
        return Element()


def residual_records(sums: Mapping[Tuple[str, ...], MultilinearOp], arity_of,
                     order=None) -> Tuple[Residual, ...]:
    records = []
    for kinds, op in sums.items():
        for inputs, value in op.table.items():
            records.append(Residual(arity_of(kinds), inputs, value))
    key = order or (lambda g: g.name)
    records.sort(key=lambda r: (len(r.inputs), r.arity, [key(g) for g in r.inputs]))
    return tuple(records)


def default_max_arity(kmax: int) -> int:
    return kmax + 2


def algebra_residuals(A: CurvedAInfAlgebra, max_arity: int, rule: SignRule = SignRule.REDUCED
                      ) -> Tuple[Residual, ...]:
    typed = A.typed_ops()
    sums = insertion_residuals(typed, typed, lambda kinds: len(kinds) <= max_arity, rule)
    return residual_records(sums, lambda kinds: (len(kinds),), A.basis.order)


def with_variant_diagnosis(check, residuals: Tuple[Residual, ...], what: str) -> Optional[SignRule]:
    """Sign rule other than the reduced one under which ``check`` passes, if any."""
    if not residuals:
        return None
    for rule in (SignRule.UNREDUCED, SignRule.TRIVIAL):
        if not check(rule):
            logger.warning(f"{what} fails the reduced sign rule but passes the {rule.value} rule")
            return rule
    return None


def check_relations(A: CurvedAInfAlgebra, max_arity: Optional[int] = None) -> RelationReport:
    """
    Check the curved A-infinity relations up to a given arity.

    Args:
        A: Algebra
        max_arity: Largest arity checked; defaults to kmax + 2

    Returns:
        Report with one residual per failing (arity, input tuple)
    """
    if max_arity is None:
        max_arity = default_max_arity(A.kmax)
    residuals = algebra_residuals(A, max_arity)
    logger.debug(f"Relations of {A.name or 'algebra'} up to arity {max_arity}: {len(residuals)} residuals")
    variant = with_variant_diagnosis(lambda rule: algebra_residuals(A, max_arity, rule), residuals,
                                     A.name or "algebra")
    return RelationReport(residuals, (), variant)


def check_unit(A: CurvedAInfAlgebra) -> bool:
    """
    Strict unitality in the reduced sign convention.

    m1(e) = 0, m2(a, e) = a, m2(e, a) = (-1)^|a| a and every higher
    operation vanishes when some input is a unit.

    Raises:
        MissingUnit: the algebra has no unit
    """
    if not A.units:
        raise MissingUnit(f"{A.name or 'algebra'} has no unit")
    m2 = A.op(2)
    for e in A.units:
        if evaluate(A.op(1), (Element.of(e),)):
            logger.debug(f"m1({e.name}) is nonzero")
            return False
        for a in A.basis:
            left = evaluate(m2, (Element.of(e), Element.of(a)))
            right = evaluate(m2, (Element.of(a), Element.of(e)))
            expected_left = Element.of(a, (-1) ** a.degree) if composable((e, a)) else Element()
            expected_right = Element.of(a) if composable((a, e)) else Element()
            if left != expected_left or right != expected_right:
                logger.debug(f"unit {e.name} fails on {a.name}")
                return False
    for k, op in A.ops.items():
        if k < 3:
            continue
        if any(u in inputs for inputs in op.table for u in A.units):
            logger.debug(f"m{k} does not vanish on units")
            return False
    return True


def is_cohomological_unit(A: CurvedAInfAlgebra) -> bool:
    """
    Units act as the identity on cohomology of a flat algebra.

    Raises:
        MissingUnit: the algebra has no unit
    """
    if not A.units:
        raise MissingUnit(f"{A.name or 'algebra'} has no unit")
    if not A.is_flat():
        return False
    basis, reps, project = block_models(A.basis, A.op(1), A.name)
    m2 = A.op(2)
    for e in A.units:
        if evaluate(A.op(1), (Element.of(e),)):
            return False
        for h in basis:
            rep = reps[h]
            if not composable((e, h)) and not composable((h, e)):
                continue
            if composable((e, h)) and project(evaluate(m2, (Element.of(e), rep))) != Element.of(h, (-1) ** h.degree):
                return False
            if composable((h, e)) and project(evaluate(m2, (rep, Element.of(e)))) != Element.of(h):
                return False
    return True


def check_mc_element(basis: Basis, b: Element):
    """Raises unless b is zero or a homogeneous degree-1 element of ``basis``."""
    for g, _ in b:
        if g not in basis:
            raise UnknownGenerator(f"{g.name} is not a generator")
    if b and (not b.is_homogeneous() or b.degree != 1):
        raise WrongDegree(f"{b} is not homogeneous of degree 1")


def deform(A: CurvedAInfAlgebra, b: Element, max_insertions: Optional[int] = None) -> CurvedAInfAlgebra:
    """
    Deform by inserting b into every possible subset of inputs.

    Args:
        A: Algebra
        b: Degree-1 element
        max_insertions: Optional bound on the number of surviving insertions

    Returns:
        Algebra with operations m^{k;b}; when m^{0;b} vanishes, m^{1;b}
        is verified to square to zero

    Raises:
        WrongDegree: b is not homogeneous of degree 1
        NotNilpotent: more than max_insertions insertions survive
        RelationFailure: m^{0;b} = 0 but m^{1;b} does not square to zero
    """
    check_mc_element(A.basis, b)
    if not b:
        return A
    sums, depth = insert_elements(A.typed_ops(), {"a": b})
    if max_insertions is not None and depth > max_insertions:
        raise NotNilpotent(f"{depth} insertions of {b} survive, bound is {max_insertions}")
    ops = {len(kinds): op for kinds, op in sums.items()}
    deformed = A.with_ops(ops, f"{A.name}^b" if A.name else "")
    logger.debug(f"Deformed {A.name or 'algebra'} by {b}: {depth} insertions survive")
    if deformed.is_flat():
        m1 = [TypedOp(deformed.op(1), ("a",), "a")]
        if any(insertion_residuals(m1, m1, lambda kinds: True).values()):
            raise RelationFailure("m1 of the deformed algebra does not square to zero")
    return deformed


def nilpotency_order(A: CurvedAInfAlgebra, b: Element) -> int:
    """Largest number of insertions of b that contributes to some deformed operation."""
    check_mc_element(A.basis, b)
    if not b:
        return 0
    return insert_elements(A.typed_ops(), {"a": b})[1]


def mc_residual(A: CurvedAInfAlgebra, b: Element) -> Element:
    """
    Sum of m^k(b, ..., b) over all arities.

    Raises:
        WrongDegree: b is not homogeneous of degree 1
    """
    check_mc_element(A.basis, b)
    return Element.sum(evaluate(op, (b,) * k) for k, op in A.ops.items())
