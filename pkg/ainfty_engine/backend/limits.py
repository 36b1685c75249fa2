"""
Directed systems of finite complexes and their direct limits.

A system carries stages A_d with inclusions i_d: A_d -> A_(d+1), targets
B_d with inclusions j_d, comparison maps F_d: A_d -> B_d and correctors
H_d acting on B_d. Once every square j_d H_d F_d = F_(d+1) i_d commutes
strictly, the colimit is read off at the last stage.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix

from .core import Basis
from .errors import NotChainMap, NotFiltrationPreserving, NotIsomorphism, SystemNotCommuting
from .homology import (ChainMap, FiniteComplex, identity, int_matrix, is_quasi_iso, is_zero, matmul, rank,
                       rows_of, submatrix, unimodular_inverse, zeros)

logger = logging.getLogger("Limits")


def compose(g: ChainMap, f: ChainMap) -> ChainMap:
    """g after f."""
    return ChainMap(f.source, g.target, {s: matmul(g.component(s), f.component(s)) for s in f.source.degrees()})


@dataclass
class DirectedSystem:
    stages: Tuple[FiniteComplex, ...]
    inclusions: Tuple[ChainMap, ...]
    targets: Tuple[FiniteComplex, ...]
    target_inclusions: Tuple[ChainMap, ...]
    comparisons: Tuple[ChainMap, ...]
    correctors: Dict[int, ChainMap] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.stages)
        if not (len(self.targets) == len(self.comparisons) == n
                and len(self.inclusions) == len(self.target_inclusions) == max(n - 1, 0)):
            raise ValueError(f"system with {n} stages needs {n} targets and comparisons and {n - 1} inclusions")

    def __len__(self):
        return len(self.stages)

    def corrector(self, d: int) -> ChainMap:
        return self.correctors.get(d) or ChainMap.identity(self.targets[d])

    def corrected(self, d: int) -> ChainMap:
        """H_d after F_d."""
        return compose(self.corrector(d), self.comparisons[d])

    def structure_map(self, d: int) -> ChainMap:
        """j_d after H_d, the map B_d -> B_(d+1) the colimit is taken along."""
        return compose(self.target_inclusions[d], self.corrector(d))


@dataclass(frozen=True)
class SquareResidual:
    """Nonzero defect of square ``square`` in degree ``degree``; kind is ``square`` or ``inclusion``."""
    square: int
    degree: int
    kind: str
    matrix: Tuple[Tuple[int, ...], ...]

    def line(self) -> str:
        entries = ";".join(",".join(str(x) for x in row) for row in self.matrix)
        return f"RESIDUAL kind={self.kind} square={self.square} degree={self.degree} matrix=[{entries}]"


def verify_system(system: DirectedSystem) -> List[SquareResidual]:
    """
    Per-square residuals j H F_d - F_(d+1) i, plus inclusions that fail to be injective.

    Returns:
        Empty list iff every square commutes strictly after correction
    """
    report = []
    for d in range(len(system) - 1):
        i = system.inclusions[d]
        for s in i.source.degrees():
            if rank(i.component(s)) < i.source.dimension(s):
                report.append(SquareResidual(d, s, "inclusion", tuple(tuple(r) for r in rows_of(i.component(s)))))
        left = compose(system.target_inclusions[d], system.corrected(d))
        right = compose(system.comparisons[d + 1], i)
        for s in system.stages[d].degrees():
            defect = left.component(s) - right.component(s)
            if not is_zero(defect):
                report.append(SquareResidual(d, s, "square", tuple(tuple(r) for r in rows_of(defect))))
    logger.debug(f"Directed system of {len(system)} stages: {len(report)} residuals")
    return report


def _is_isomorphism(f: ChainMap) -> bool:
    for s in f.degrees():
        m = f.component(s)
        if m.shape[0] != m.shape[1]:
            return False
        try:
            unimodular_inverse(m)
        except NotIsomorphism:
            return False
    return True


@dataclass
class LimitResult:
    system: DirectedSystem
    complex: FiniteComplex
    limit_map: ChainMap
    stable_from: Optional[int]

    def stage_inclusion(self, d: int) -> ChainMap:
        """A_d -> A_N along the inclusions."""
        f = ChainMap.identity(self.system.stages[d])
        for e in range(d, len(self.system) - 1):
            f = compose(self.system.inclusions[e], f)
        return f

    def target_inclusion(self, d: int) -> ChainMap:
        """B_d -> B_N along the corrected structure maps."""
        f = ChainMap.identity(self.system.targets[d])
        for e in range(d, len(self.system) - 1):
            f = compose(self.system.structure_map(e), f)
        return f

    def restriction_defects(self, d: int) -> Dict[int, DomainMatrix]:
        """Limit map on stage d against F_d pushed to the last stage along the corrected structure maps."""
        left = compose(self.limit_map, self.stage_inclusion(d))
        right = compose(self.target_inclusion(d), self.system.comparisons[d])
        defects = {}
        for s in self.system.stages[d].degrees():
            defect = left.component(s) - right.component(s)
            if not is_zero(defect):
                defects[s] = defect
        return defects

    def line(self) -> str:
        stable = "none" if self.stable_from is None else self.stable_from
        dims = ",".join(f"{s}:{self.complex.dimension(s)}" for s in self.complex.degrees())
        return f"LIMIT stages={len(self.system)} stable_from={stable} dims=[{dims}]"


def direct_limit(system: DirectedSystem) -> LimitResult:
    """
    Colimit of a strictly commuting system with finitely many stages.

    Returns:
        The last stage, the last comparison map as limit map, and the first
        stage from which every inclusion is an isomorphism

    Raises:
        SystemNotCommuting: verify_system reports residuals
    """
    report = verify_system(system)
    if report:
        raise SystemNotCommuting(f"{len(report)} squares fail, first: {report[0].line()}")
    last = len(system) - 1
    stable_from = last
    for d in reversed(range(last)):
        if not _is_isomorphism(system.inclusions[d]):
            break
        stable_from = d
    logger.info(f"Direct limit over {len(system)} stages, stable from stage {stable_from}")
    return LimitResult(system, system.stages[last], system.comparisons[last], stable_from)


def truncation(complex_: FiniteComplex, threshold: Fraction) -> Tuple[FiniteComplex, List[Tuple[int, List[int]]]]:
    """
    Subcomplex spanned by generators with filtration at least ``threshold``.

    Returns:
        (subcomplex, per degree the kept indices in the ambient piece)

    Raises:
        NotFiltrationPreserving: the differential leaves the span
    """
    pieces = {}
    kept = {}
    for s in complex_.degrees():
        kept[s] = [n for n, g in enumerate(complex_.piece(s)) if g.filtration >= threshold]
        pieces[s] = Basis(complex_.piece(s)[n] for n in kept[s])
    differentials = {}
    for s in complex_.degrees():
        d = rows_of(complex_.differential(s))
        target = kept.get(s + 1, [])
        for i, row in enumerate(d):
            if i not in target and any(row[j] for j in kept[s]):
                raise NotFiltrationPreserving(f"differential lowers filtration below {threshold} in degree {s}")
        if target and kept[s]:
            differentials[s] = submatrix(complex_.differential(s), target, kept[s])
    name = f"{complex_.name or 'complex'}>={threshold}"
    return FiniteComplex(pieces, differentials, name), kept


def _selection(sub: Dict[int, List[int]], big: Dict[int, List[int]], source: FiniteComplex,
               target: FiniteComplex) -> ChainMap:
    components = {}
    for s, rows in big.items():
        cols = sub.get(s, [])
        components[s] = [[int(r == c) for c in cols] for r in rows] if rows else zeros(0, len(cols))
    return ChainMap(source, target, {s: int_matrix(m, (target.dimension(s), source.dimension(s)))
                                     for s, m in components.items()})


def _restrict(f: ChainMap, source: FiniteComplex, source_kept, target: FiniteComplex, target_kept) -> ChainMap:
    components = {}
    for s in source.degrees():
        rows = rows_of(f.component(s))
        outside = [i for i in range(len(rows)) if i not in target_kept.get(s, [])]
        if any(rows[i][j] for i in outside for j in source_kept[s]):
            raise NotFiltrationPreserving(f"map lowers filtration in degree {s}")
        components[s] = submatrix(f.component(s), target_kept.get(s, []), source_kept[s]) \
            if target_kept.get(s) else zeros(0, len(source_kept[s]))
    return ChainMap(source, target, components)


def filtration_system(complex_: FiniteComplex, f: Optional[ChainMap] = None,
                      levels: Optional[Sequence[Fraction]] = None) -> DirectedSystem:
    """
    Increasing system of filtered truncations of a complex.

    Stage d keeps generators with filtration at least the d-th threshold,
    thresholds running downward through ``levels`` (all levels by default).
    With ``f`` given, the comparison maps are its restrictions to matching
    truncations of ``f.target``; otherwise they are identities.
    """
    target = f.target if f is not None else complex_
    f = f if f is not None else ChainMap.identity(complex_)
    if levels is None:
        levels = {g.filtration for g in complex_.generators} | {g.filtration for g in target.generators}
    thresholds = sorted(levels, reverse=True)
    stages, targets, comparisons, kept_a, kept_b = [], [], [], [], []
    for threshold in thresholds:
        a, ka = truncation(complex_, threshold)
        b, kb = truncation(target, threshold)
        stages.append(a)
        targets.append(b)
        kept_a.append(ka)
        kept_b.append(kb)
        comparisons.append(_restrict(f, a, ka, b, kb))

    def local(sub, big):
        return {s: [big[s].index(n) for n in rows] for s, rows in sub.items() if s in big}

    inclusions = []
    target_inclusions = []
    for d in range(len(thresholds) - 1):
        inclusions.append(_selection(local(kept_a[d], kept_a[d + 1]),
                                     {s: list(range(len(v))) for s, v in kept_a[d + 1].items()},
                                     stages[d], stages[d + 1]))
        target_inclusions.append(_selection(local(kept_b[d], kept_b[d + 1]),
                                            {s: list(range(len(v))) for s, v in kept_b[d + 1].items()},
                                            targets[d], targets[d + 1]))
    return DirectedSystem(tuple(stages), tuple(inclusions), tuple(targets), tuple(target_inclusions),
                          tuple(comparisons))


def compute_corrector(f: ChainMap, f_next: ChainMap, i: ChainMap, j: ChainMap) -> ChainMap:
    """
    H with j H f = f_next i, namely H = j^T f_next i f^-1.

    ``j`` must be a coordinate inclusion and ``f`` an isomorphism.

    Raises:
        NotIsomorphism: f or the resulting H is not invertible
        SystemNotCommuting: f_next i f^-1 leaves the image of j
        NotChainMap: H does not commute with the differentials
    """
    target = f.target
    components = {}
    for s in target.degrees():
        jm = rows_of(j.component(s))
        selected = [next((r for r, row in enumerate(jm) if row[c]), None) for c in range(target.dimension(s))]
        if None in selected or any(sum(row) > 1 for row in jm) or any(x not in (0, 1) for row in jm for x in row):
            raise SystemNotCommuting(f"target inclusion is not a coordinate inclusion in degree {s}")
        if f.source.dimension(s) == 0:
            components[s] = identity(target.dimension(s))
            continue
        inverse = unimodular_inverse(f.component(s))
        pushed = matmul(matmul(f_next.component(s), i.component(s)), inverse)
        rows = rows_of(pushed)
        outside = [r for r in range(len(rows)) if r not in selected]
        if any(rows[r][c] for r in outside for c in range(len(selected))):
            raise SystemNotCommuting(f"corrected square leaves the image of j in degree {s}")
        components[s] = submatrix(pushed, selected, list(range(len(selected))))
    h = ChainMap(target, target, components)
    if not _is_isomorphism(h):
        raise NotIsomorphism("corrector is not invertible")
    h.check()
    return h


def stagewise_quasi_isomorphisms(system: DirectedSystem) -> List[bool]:
    """is_quasi_iso of every corrected comparison map."""
    result = []
    for d in range(len(system)):
        try:
            result.append(is_quasi_iso(system.corrected(d)))
        except NotChainMap:
            result.append(False)
    return result
