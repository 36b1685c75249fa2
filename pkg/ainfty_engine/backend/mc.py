"""
Filtrations, cyclic elements and bounding cochains.
A cyclic element of a filtered module determines a unique bounding cochain
in strictly positive filtration; it is solved level by level in increasing
filtration order.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .ainfty import CurvedAInfAlgebra, check_mc_element, mc_residual
from .core import Basis, Element, MultilinearOp, evaluate, insert_elements
from .errors import (Divergence, N0DoesNotIncrease, NoSolution, NotFiltrationPreserving,
                     NotIsomorphism, NotNilpotent, NotStrictlyCompatible, WrongDegree)
from .homology import int_matrix, rows_of, submatrix, unimodular_inverse
from .modcat import AInfModule

logger = logging.getLogger("MaurerCartan")


@dataclass(frozen=True)
class FiltrationProfile:
    """Sorted filtration levels of a finite basis."""
    levels: Tuple[Fraction, ...]
    bounded_above: bool = True
    zero_included: bool = False

    @classmethod
    def of(cls, basis: Basis) -> "FiltrationProfile":
        levels = basis.levels()
        return cls(levels, True, Fraction(0) in levels)

    def with_zero(self) -> Tuple[Fraction, ...]:
        return tuple(sorted(set(self.levels) | {Fraction(0)}))

    def strictly_compatible(self, other: "FiltrationProfile") -> bool:
        return self.with_zero() == other.with_zero()

    def positive(self) -> Tuple[Fraction, ...]:
        return tuple(level for level in self.levels if level > 0)


@dataclass(frozen=True)
class CyclicElementCertificate:
    """
    Evidence that u is a cyclic element.

    ``iso_matrix`` is x -> n1(x; u) with columns in the algebra basis order
    and rows in the module basis order; ``strict_increase_witness`` splits
    n0(u) by filtration level.
    """
    u: Element
    iso_matrix: Tuple[Tuple[int, ...], ...]
    strict_increase_witness: Tuple[Tuple[Fraction, Element], ...]


def action_matrix(C: CurvedAInfAlgebra, D: AInfModule, u: Element) -> List[List[int]]:
    """Matrix of x -> n1(x; u) from the algebra basis to the module basis."""
    n1 = D.op(1)
    matrix = [[0] * len(C.basis) for _ in range(len(D.basis))]
    for j, x in enumerate(C.basis):
        for y, c in evaluate(n1, (Element.of(x), u)):
            matrix[D.basis.index(y)][j] = c
    return matrix


def verify_cyclic(C: CurvedAInfAlgebra, D: AInfModule, u: Element) -> CyclicElementCertificate:
    """
    Certify that u is a cyclic element of D.

    Raises:
        NotStrictlyCompatible: filtration levels of C and D differ (0 included)
        NotFiltrationPreserving: u is not in F^0 with a level-0 term, or the
            action map or its inverse lowers filtration
        NotIsomorphism: x -> n1(x; u) is not invertible over the integers
        N0DoesNotIncrease: n0(u) has a term at filtration <= 0
    """
    if not FiltrationProfile.of(C.basis).strictly_compatible(FiltrationProfile.of(D.basis)):
        raise NotStrictlyCompatible(f"levels {C.basis.levels()} and {D.basis.levels()} differ")
    for g, _ in u:
        if g not in D.basis:
            raise NotFiltrationPreserving(f"{g.name} is not a module generator")
    if not u or u.min_filtration() != 0:
        raise NotFiltrationPreserving(f"{u} must lie in F^0 with a term at level 0")
    if not u.is_homogeneous():
        raise WrongDegree(f"{u} is not homogeneous")
    matrix = action_matrix(C, D, u)
    if len(C.basis) != len(D.basis):
        raise NotIsomorphism(f"action map is {len(D.basis)}x{len(C.basis)}")
    inverse = rows_of(unimodular_inverse(int_matrix(matrix, (len(D.basis), len(C.basis)))))
    for i, y in enumerate(D.basis):
        for j, x in enumerate(C.basis):
            if matrix[i][j] and y.filtration < x.filtration:
                raise NotFiltrationPreserving(f"{x.name} maps to {y.name} at lower filtration")
            if inverse[j][i] and x.filtration < y.filtration:
                raise NotFiltrationPreserving(f"inverse maps {y.name} to {x.name} at lower filtration")
    n0u = evaluate(D.op(0), (u,))
    witness = {}
    for g, c in n0u:
        if g.filtration <= 0:
            raise N0DoesNotIncrease(f"n0(u) has term {c}*{g.name} at filtration {g.filtration}")
        witness[g.filtration] = witness.get(g.filtration, Element()) + Element.of(g, c)
    logger.debug(f"Certified cyclic element {u}")
    return CyclicElementCertificate(u, tuple(tuple(r) for r in matrix), tuple(sorted(witness.items())))


@dataclass(frozen=True)
class EquationBlock:
    """Unknowns and equations at one filtration level, with the unimodular block N."""
    level: Fraction
    unknowns: Basis
    rows: Basis
    matrix: Tuple[Tuple[int, ...], ...]


def equation_blocks(C: CurvedAInfAlgebra, D: AInfModule, cert: CyclicElementCertificate) -> List[EquationBlock]:
    """
    Filtration-ordered block system solved for b.

    Unknowns are degree-1 generators of C at positive filtration; the rows at
    a level are the module generators of degree |u| + 1 at that level.
    """
    degree = cert.u.degree
    unknowns = C.basis.restrict(lambda g: g.degree == 1 and g.filtration > 0)
    targets = D.basis.restrict(lambda g: g.degree == degree + 1)
    full = int_matrix(cert.iso_matrix, (len(D.basis), len(C.basis)))
    blocks = []
    for level in sorted({g.filtration for g in unknowns}):
        cols = unknowns.restrict(lambda g: g.filtration == level)
        rows = targets.restrict(lambda g: g.filtration == level)
        block = submatrix(full, [D.basis.index(g) for g in rows], [C.basis.index(g) for g in cols])
        blocks.append(EquationBlock(level, cols, rows, tuple(tuple(r) for r in rows_of(block))))
    return blocks


def deformed_module_differential(D: AInfModule, b: Element, max_insertions: Optional[int] = None) -> MultilinearOp:
    """
    d^b(y) = sum over k of n^k(b, ..., b; y).

    Raises:
        NotNilpotent: more than max_insertions insertions survive
    """
    check_mc_element(D.algebra.basis, b)
    if not b:
        return D.op(0)
    sums, depth = insert_elements(D.typed_ops(), {"a": b})
    if max_insertions is not None and depth > max_insertions:
        raise NotNilpotent(f"{depth} insertions of {b} survive, bound is {max_insertions}")
    return sums.get(D.kinds(0), MultilinearOp.zero(1, 1))


def cyclic_residual(D: AInfModule, b: Element, u: Element) -> Element:
    """d^b(u) evaluated directly from the module operations."""
    return Element.sum(evaluate(op, (b,) * k + (u,)) for k, op in D.ops.items())


def insertion_bound(C: CurvedAInfAlgebra, D: AInfModule) -> int:
    """Largest number of positive-filtration insertions compatible with the filtration range."""
    levels = set(C.basis.levels()) | set(D.basis.levels())
    positive = [level for level in levels if level > 0]
    if not positive:
        return 0
    spread = max(levels) - min(min(levels), Fraction(0))
    return int(spread / min(positive))


def solve_bounding_cochain(C: CurvedAInfAlgebra, D: AInfModule, cert: CyclicElementCertificate) -> Element:
    """
    Unique bounding cochain in positive filtration for a cyclic element.

    Args:
        C: Filtered curved algebra
        D: Left module over C
        cert: Certificate from verify_cyclic

    Returns:
        b with mc_residual(C, b) = 0 and d^b(u) = 0

    Raises:
        NoSolution: the block system is not integrally solvable or the result
            fails verification
        Divergence: more insertions of b survive than the filtration range allows
    """
    u = cert.u
    b = Element()
    blocks = equation_blocks(C, D, cert)
    if not blocks and C.curvature:
        raise NoSolution("no degree-1 generators in positive filtration but the curvature is nonzero")
    for block in blocks:
        rows = list(block.rows)
        if len(rows) != len(block.unknowns):
            raise NoSolution(f"level {block.level}: {len(rows)} equations for {len(block.unknowns)} unknowns")
        try:
            inverse = rows_of(unimodular_inverse(int_matrix(block.matrix, (len(rows), len(rows)))))
        except NotIsomorphism as e:
            raise NoSolution(f"level {block.level}: {e}") from None
        residual = cyclic_residual(D, b, u)
        rhs = [residual.coefficient(g) for g in rows]
        step = [-sum(inverse[i][j] * rhs[j] for j in range(len(rows))) for i in range(len(rows))]
        b = b + block.unknowns.element(step)
        logger.debug(f"Level {block.level}: b = {C.basis.format_element(b)}")
    if b:
        depth = insert_elements(D.typed_ops(), {"a": b})[1]
        bound = insertion_bound(C, D)
        if depth > bound:
            raise Divergence(f"{depth} insertions of b survive, filtration range allows {bound}")
    if cyclic_residual(D, b, u):
        raise NoSolution(f"d^b(u) = {cyclic_residual(D, b, u)} after solving")
    if mc_residual(C, b):
        raise NoSolution(f"mc residual {mc_residual(C, b)} is nonzero after solving")
    logger.info(f"Bounding cochain b = {C.basis.format_element(b)}")
    return b


def brute_force_bounding_cochains(C: CurvedAInfAlgebra, D: AInfModule, u: Element, box: int = 5) -> List[Element]:
    """
    Every b in the coefficient box [-box, box] over positive-filtration degree-1
    generators with mc_residual(C, b) = 0 and d^b(u) = 0.
    """
    unknowns = C.basis.restrict(lambda g: g.degree == 1 and g.filtration > 0)
    found = []
    for coeffs in itertools.product(range(-box, box + 1), repeat=len(unknowns)):
        b = unknowns.element(coeffs)
        if not cyclic_residual(D, b, u) and not mc_residual(C, b):
            found.append(b)
    return found
