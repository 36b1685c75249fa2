"""
First page of the bar spectral sequence for the lambda comparison map.

Columns are built from cohomology-level data: the algebra H(A) with its
induced product and the module H(M) with its induced action. A strict unit
provides the contracting homotopy kappa on positive columns.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sympy.polys.matrices import DomainMatrix

from .ainfty import CurvedAInfAlgebra
from .core import Element, Generator, MultilinearOp, composable, evaluate
from .errors import NotUnital, RelationFailure, UnknownGenerator
from .homology import block_models, identity, int_matrix, matmul, zeros
from .modcat import (LEFT, AInfModule, ElementaryKey, PreModuleHom, elementary_keys,
                     hom_differential, yoneda_left)

logger = logging.getLogger("Bar")


def cohomology_algebra(A: CurvedAInfAlgebra) -> CurvedAInfAlgebra:
    """
    Cohomology of a flat algebra with the induced product.

    Raises:
        NotUnital: a unit does not survive as a cohomology generator
        NonFreeCohomology: some hom space has torsion in cohomology
    """
    if not A.is_flat():
        raise RelationFailure(f"{A.name or 'algebra'} is curved; m1 is not a differential")
    basis, reps, project = block_models(A.basis, A.op(1), A.name)
    table = {}
    for h2 in basis:
        for h1 in basis:
            if composable((h2, h1)):
                value = project(evaluate(A.op(2), (reps[h2], reps[h1])))
                if value:
                    table[(h2, h1)] = value
    units = []
    for e in A.units:
        try:
            unit = basis.get(e.name)
        except UnknownGenerator:
            raise NotUnital(f"unit {e.name} is not a cohomology generator") from None
        units.append(unit)
    return CurvedAInfAlgebra(basis, {2: MultilinearOp(2, 0, table)}, units, f"H({A.name})", kmax=2)


def cohomology_module(M: AInfModule, HA: CurvedAInfAlgebra, A: CurvedAInfAlgebra) -> AInfModule:
    """Cohomology of a left module with the action induced by n1."""
    basis, reps, project = block_models(M.basis, M.op(0), M.name)
    _, algebra_reps, _ = block_models(A.basis, A.op(1), A.name)
    table = {}
    for h in HA.basis:
        for y in basis:
            if composable((h, y)):
                value = project(evaluate(M.op(1), (algebra_reps[h], reps[y])))
                if value:
                    table[(h, y)] = value
    return AInfModule(HA, basis, {1: MultilinearOp(2, 0, table)}, LEFT, f"H({M.name})")


@dataclass(frozen=True)
class BarColumn:
    """
    Graded piece E1^{r,s}.

    Column 0 holds cohomology generators of M(Y); column r >= 1 holds
    elementary maps with r - 1 algebra inputs and internal degree s.
    """
    r: int
    s: int
    keys: Tuple = ()

    def __len__(self):
        return len(self.keys)

    @property
    def hom_degree(self) -> int:
        return self.s if self.r == 0 else self.s + self.r - 1

    def index(self, key) -> int:
        return self.keys.index(key)


@dataclass
class BarPage:
    """E1 page with its differential d and contracting homotopy kappa, keyed by (r, s)."""
    module: AInfModule
    yoneda: AInfModule
    unit: Generator
    columns: Dict[Tuple[int, int], BarColumn] = field(default_factory=dict)
    d: Dict[Tuple[int, int], DomainMatrix] = field(default_factory=dict)
    kappa: Dict[Tuple[int, int], DomainMatrix] = field(default_factory=dict)

    def column(self, r: int, s: int) -> BarColumn:
        return self.columns.get((r, s)) or BarColumn(r, s)

    def internal_degrees(self) -> List[int]:
        return sorted({s for _, s in self.columns})

    def length(self) -> int:
        return max((r for r, _ in self.columns), default=0)


def _internal_degree(key: ElementaryKey) -> int:
    inputs, out = key
    return out.degree - sum(g.degree for g in inputs)


def bar_page(A: CurvedAInfAlgebra, M: AInfModule, Y: Optional[str], length: int = 4) -> BarPage:
    """
    Assemble columns r = 0 .. length + 1 of the E1 page.

    Args:
        A: Flat strictly unital algebra
        M: Left module over A
        Y: Object
        length: Largest column with both d and kappa available

    Raises:
        NotUnital: A has no unit at Y
    """
    e = A.unit_for(Y) or (A.unit if Y is None else None)
    if e is None:
        raise NotUnital(f"{A.name or 'algebra'} has no unit at {Y}")
    HA = cohomology_algebra(A)
    HM = cohomology_module(M, HA, A)
    HY = yoneda_left(HA, Y)
    unit = HA.basis.get(e.name)
    page = BarPage(HM, HY, unit)
    grouped: Dict[Tuple[int, int], List] = {}
    for h in HM.at(Y):
        grouped.setdefault((0, h.degree), []).append(h)
    for r in range(1, length + 2):
        for key in elementary_keys(HA.basis, HY.basis, HM.basis, r - 1):
            grouped.setdefault((r, _internal_degree(key)), []).append(key)
    page.columns = {rs: BarColumn(rs[0], rs[1], tuple(keys)) for rs, keys in grouped.items()}
    for s in page.internal_degrees():
        for r in range(0, length + 1):
            page.d[(r, s)] = _d_matrix(page, r, s)
            page.kappa[(r, s)] = _kappa_matrix(page, r, s)
    logger.debug(f"E1 page of {M.name or 'module'} at {Y}: {len(page.columns)} nonzero pieces")
    return page


def _elementary(page: BarPage, key: ElementaryKey, degree: int) -> PreModuleHom:
    inputs, out = key
    op = MultilinearOp(len(inputs), degree - (len(inputs) - 1), {inputs: Element.of(out)})
    return PreModuleHom(page.yoneda, page.module, degree, {len(inputs): op})


def _d_matrix(page: BarPage, r: int, s: int) -> DomainMatrix:
    source, target = page.column(r, s), page.column(r + 1, s)
    matrix = [[0] * len(source) for _ in range(len(target))]
    n1 = page.module.op(1)
    for j, key in enumerate(source.keys):
        if r == 0:
            for b in page.yoneda.basis:
                for out, c in evaluate(n1, (Element.of(b), Element.of(key))):
                    matrix[target.index(((b,), out))][j] += c
            continue
        image = hom_differential(_elementary(page, key, source.hom_degree))
        for inputs, value in image.component(r + 1).table.items():
            for out, c in value:
                matrix[target.index((inputs, out))][j] += c
    return int_matrix(matrix, (len(target), len(source)))


def _kappa_matrix(page: BarPage, r: int, s: int) -> DomainMatrix:
    """kappa from E1^{r+1,s} to E1^{r,s}: t(x_r, ..., x_1, b) with b = e_Y moves x_1 into the module slot."""
    source, target = page.column(r + 1, s), page.column(r, s)
    matrix = [[0] * len(source) for _ in range(len(target))]
    for j, key in enumerate(source.keys):
        inputs, out = key
        if inputs[-1] != page.unit:
            continue
        degree = source.hom_degree
        sign = (-1) ** degree if r == 0 else (-1) ** (degree + 1)
        reduced = out if r == 0 else (inputs[:-1], out)
        matrix[target.index(reduced)][j] += sign
    return int_matrix(matrix, (len(target), len(source)))


def bar_e1(A: CurvedAInfAlgebra, Y: Optional[str], M: AInfModule, r: int, s: int, length: int = 4) -> BarColumn:
    return bar_page(A, M, Y, max(length, r)).column(r, s)


def bar_kappa(page: BarPage, r: int, s: int) -> DomainMatrix:
    """Contracting homotopy from E1^{r+1,s} to E1^{r,s}."""
    return page.kappa.get((r, s)) if (r, s) in page.kappa else _kappa_matrix(page, r, s)


def kappa_identity_defect(page: BarPage, r: int, s: int) -> DomainMatrix:
    """
    kappa d + d kappa - id on E1^{r,s}.

    At r = 0 only kappa d contributes.
    """
    n = len(page.column(r, s))
    total = matmul(page.kappa[(r, s)], page.d[(r, s)])
    if r >= 1:
        total = total + matmul(page.d[(r - 1, s)], page.kappa[(r - 1, s)])
    return total - identity(n) if n else zeros(0, 0)


def d_squared(page: BarPage, r: int, s: int) -> DomainMatrix:
    return matmul(page.d[(r + 1, s)], page.d[(r, s)])
