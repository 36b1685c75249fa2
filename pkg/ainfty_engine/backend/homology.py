"""
Integer cohomology of finite complexes.
Smith normal form, cohomology summaries, mapping cones, quasi-isomorphism
certification and cohomology-level models with representative cycles.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from .core import Basis, Element, Generator, MultilinearOp
from .errors import NonFreeCohomology, NotAComplex, NotChainMap, NotIsomorphism

logger = logging.getLogger("Homology")

Rows = List[List[int]]
MatrixLike = Union[DomainMatrix, Sequence[Sequence[int]]]


def int_matrix(rows: MatrixLike, shape: Optional[Tuple[int, int]] = None) -> DomainMatrix:
    """Integer DomainMatrix from nested rows; ``shape`` is required for empty matrices."""
    if isinstance(rows, DomainMatrix):
        return rows
    rows = [list(r) for r in rows]
    if shape is None:
        shape = (len(rows), len(rows[0]) if rows else 0)
    if shape[0] == 0:
        return DomainMatrix([], shape, ZZ)
    return DomainMatrix([[ZZ(int(x)) for x in r] for r in rows], shape, ZZ)


def zeros(nrows: int, ncols: int) -> DomainMatrix:
    return int_matrix([[0] * ncols for _ in range(nrows)], (nrows, ncols))


def identity(n: int) -> DomainMatrix:
    return int_matrix([[int(i == j) for j in range(n)] for i in range(n)], (n, n))


def rows_of(m: DomainMatrix) -> Rows:
    nrows, ncols = m.shape
    if nrows == 0:
        return []
    if ncols == 0:
        return [[] for _ in range(nrows)]
    return [[int(x) for x in r] for r in m.to_list()]


def matmul(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    if 0 in (a.shape[0], a.shape[1], b.shape[1]):
        return zeros(a.shape[0], b.shape[1])
    return a * b


def is_zero(m: DomainMatrix) -> bool:
    return not any(any(r) for r in rows_of(m))


def submatrix(m: DomainMatrix, rows: Sequence[int], cols: Sequence[int]) -> DomainMatrix:
    full = rows_of(m)
    return int_matrix([[full[i][j] for j in cols] for i in rows], (len(rows), len(cols)))


def smith_normal_form(matrix: MatrixLike) -> Tuple[DomainMatrix, DomainMatrix, DomainMatrix]:
    """
    Smith normal form over the integers.

    Args:
        matrix: Integer matrix

    Returns:
        (U, D, V) with U * M * V == D, U and V unimodular and the nonzero
        diagonal of D a divisibility chain
    """
    m = int_matrix(matrix)
    nrows, ncols = m.shape
    if nrows == 0 or ncols == 0:
        return identity(nrows), m, identity(ncols)
    d, u, v = smith_normal_decomp(m)
    return u, d, v


def invariant_factors(matrix: MatrixLike) -> Tuple[int, ...]:
    """Nonzero diagonal entries of the Smith normal form, made positive."""
    _, d, _ = smith_normal_form(matrix)
    rows = rows_of(d)
    return tuple(abs(rows[i][i]) for i in range(min(d.shape)) if rows[i][i])


def rank(matrix: MatrixLike) -> int:
    return len(invariant_factors(matrix))


def determinant(matrix: MatrixLike) -> int:
    m = int_matrix(matrix)
    if m.shape[0] != m.shape[1]:
        raise NotIsomorphism(f"matrix of shape {m.shape} is not square")
    if m.shape[0] == 0:
        return 1
    return int(m.det())


def unimodular_inverse(matrix: MatrixLike) -> DomainMatrix:
    """Integer inverse of a matrix with determinant +-1."""
    m = int_matrix(matrix)
    det = determinant(m)
    if det not in (1, -1):
        raise NotIsomorphism(f"determinant {det} is not a unit")
    if m.shape[0] == 0:
        return m
    return m.convert_to(QQ).inv().convert_to(ZZ)


def column(m: DomainMatrix, j: int) -> List[int]:
    return [r[j] for r in rows_of(m)]


class FiniteComplex:
    """
    Cochain complex of finitely generated free abelian groups.

    ``differentials[s]`` is the matrix of d: C^s -> C^(s+1) acting on column
    vectors in basis order; missing degrees are zero.
    """

    def __init__(self, pieces: Mapping[int, Basis], differentials: Optional[Mapping[int, MatrixLike]] = None,
                 name: str = ""):
        self.name = name
        self.pieces: Dict[int, Basis] = {s: b for s, b in pieces.items() if len(b)}
        self._differentials: Dict[int, DomainMatrix] = {}
        for s, matrix in (differentials or {}).items():
            shape = (self.dimension(s + 1), self.dimension(s))
            m = int_matrix(matrix, shape)
            if m.shape != shape:
                raise NotAComplex(f"differential in degree {s} has shape {m.shape}, expected {shape}")
            self._differentials[s] = m

    @classmethod
    def from_operation(cls, basis: Basis, op: MultilinearOp, name: str = "") -> "FiniteComplex":
        """Complex of a degree-one arity-one operation on a graded basis."""
        pieces = {s: basis.of_degree(s) for s in basis.degrees()}
        differentials = {}
        for s, piece in pieces.items():
            target = pieces.get(s + 1)
            if target is None:
                continue
            matrix = [[0] * len(piece) for _ in range(len(target))]
            for j, g in enumerate(piece):
                image = op.table.get((g,))
                if image is None:
                    continue
                for h, c in image:
                    matrix[target.index(h)][j] = c
            differentials[s] = matrix
        return cls(pieces, differentials, name)

    def degrees(self) -> List[int]:
        return sorted(self.pieces)

    def dimension(self, s: int) -> int:
        return len(self.pieces.get(s, ()))

    def piece(self, s: int) -> Basis:
        return self.pieces.get(s, Basis())

    def differential(self, s: int) -> DomainMatrix:
        m = self._differentials.get(s)
        return m if m is not None else zeros(self.dimension(s + 1), self.dimension(s))

    @property
    def generators(self) -> Basis:
        return Basis(g for s in self.degrees() for g in self.pieces[s])

    def apply(self, element: Element) -> Element:
        """Differential of an element written over the pieces."""
        result = Element()
        for g, c in element:
            source = self.piece(g.degree)
            col = column(self.differential(g.degree), source.index(g)) if self.dimension(g.degree + 1) else []
            result = result + self.piece(g.degree + 1).element(col) * c
        return result

    def check(self):
        """Raises NotAComplex unless d(s+1) * d(s) vanishes in every degree."""
        for s in self.degrees():
            square = matmul(self.differential(s + 1), self.differential(s))
            if not is_zero(square):
                raise NotAComplex(f"d squared is nonzero from degree {s} of {self.name or 'complex'}")

    def __repr__(self):
        dims = ", ".join(f"{s}:{self.dimension(s)}" for s in self.degrees())
        return f"FiniteComplex({self.name!r}, {{{dims}}})"


@dataclass(frozen=True)
class DegreeHomology:
    degree: int
    betti: int
    torsion: Tuple[int, ...]

    def line(self) -> str:
        return f"{self.degree} b={self.betti} tors=[{','.join(str(t) for t in self.torsion)}]"


@dataclass(frozen=True)
class HomologySummary:
    """Free rank and torsion invariant factors per degree."""
    degrees: Tuple[DegreeHomology, ...]

    def betti(self, s: int) -> int:
        return next((d.betti for d in self.degrees if d.degree == s), 0)

    def torsion(self, s: int) -> Tuple[int, ...]:
        return next((d.torsion for d in self.degrees if d.degree == s), ())

    def is_acyclic(self) -> bool:
        return all(d.betti == 0 and not d.torsion for d in self.degrees)

    def lines(self) -> List[str]:
        return [d.line() for d in self.degrees]


def cohomology(complex_: FiniteComplex) -> HomologySummary:
    """
    Integer cohomology via Smith normal form of consecutive differentials.

    Args:
        complex_: Finite complex

    Returns:
        Betti numbers and torsion for every degree carrying a generator or torsion
    """
    complex_.check()
    degrees = set(complex_.degrees())
    degrees |= {s + 1 for s in complex_.degrees()}
    result = []
    factors = {s: invariant_factors(complex_.differential(s)) for s in sorted(degrees | {s - 1 for s in degrees})}
    for s in sorted(degrees):
        betti = complex_.dimension(s) - len(factors.get(s, ())) - len(factors.get(s - 1, ()))
        torsion = tuple(f for f in factors.get(s - 1, ()) if f > 1)
        if complex_.dimension(s) or torsion:
            result.append(DegreeHomology(s, betti, torsion))
    logger.debug(f"Cohomology of {complex_.name or 'complex'}: {[d.line() for d in result]}")
    return HomologySummary(tuple(result))


class ChainMap:
    """
    Degree-zero map between finite complexes.

    Args:
        source: Source complex
        target: Target complex
        components: Degree -> matrix from source piece to target piece
    """

    def __init__(self, source: FiniteComplex, target: FiniteComplex,
                 components: Optional[Mapping[int, MatrixLike]] = None):
        self.source = source
        self.target = target
        self._components = {}
        for s, matrix in (components or {}).items():
            shape = (target.dimension(s), source.dimension(s))
            self._components[s] = int_matrix(matrix, shape)

    @classmethod
    def identity(cls, complex_: FiniteComplex) -> "ChainMap":
        return cls(complex_, complex_, {s: identity(complex_.dimension(s)) for s in complex_.degrees()})

    def component(self, s: int) -> DomainMatrix:
        m = self._components.get(s)
        return m if m is not None else zeros(self.target.dimension(s), self.source.dimension(s))

    def degrees(self) -> List[int]:
        return sorted(set(self.source.degrees()) | set(self.target.degrees()))

    def chain_defects(self) -> Dict[int, DomainMatrix]:
        """d_D f - f d_C per degree, nonzero entries only."""
        defects = {}
        for s in self.degrees():
            defect = matmul(self.target.differential(s), self.component(s)) - \
                matmul(self.component(s + 1), self.source.differential(s))
            if not is_zero(defect):
                defects[s] = defect
        return defects

    def check(self):
        defects = self.chain_defects()
        if defects:
            raise NotChainMap(f"map does not commute with differentials in degrees {sorted(defects)}")


def cone(f: ChainMap) -> FiniteComplex:
    """
    Mapping cone with Cone^n = C^(n+1) + D^n and d(c, x) = (-d_C c, f(c) + d_D x).

    Raises:
        NotChainMap: f does not commute with the differentials
    """
    f.check()
    degrees = sorted({s - 1 for s in f.source.degrees()} | set(f.target.degrees()))
    pieces = {}
    for n in degrees:
        shifted = [Generator(f"C:{g.name}", n, g.filtration, g.source, g.target) for g in f.source.piece(n + 1)]
        kept = [Generator(f"D:{g.name}", n, g.filtration, g.source, g.target) for g in f.target.piece(n)]
        pieces[n] = Basis(shifted + kept)
    differentials = {}
    for n in degrees:
        a, b = f.source.dimension(n + 1), f.target.dimension(n)
        a2, b2 = f.source.dimension(n + 2), f.target.dimension(n + 1)
        d_c = rows_of(f.source.differential(n + 1))
        d_d = rows_of(f.target.differential(n))
        f_n = rows_of(f.component(n + 1))
        matrix = []
        for i in range(a2):
            matrix.append([-d_c[i][j] for j in range(a)] + [0] * b)
        for i in range(b2):
            matrix.append([f_n[i][j] for j in range(a)] + [d_d[i][j] for j in range(b)])
        differentials[n] = int_matrix(matrix, (a2 + b2, a + b))
    return FiniteComplex(pieces, differentials, f"cone({f.source.name}->{f.target.name})")


def is_quasi_iso(f: ChainMap) -> bool:
    """True iff the mapping cone is acyclic over the integers."""
    return cohomology(cone(f)).is_acyclic()


class HomologyModel:
    """
    Free cohomology of a complex with chosen representative cycles.

    Generators of the cohomology basis keep the name of their representative
    when it is a single generator with coefficient one.

    Raises:
        NonFreeCohomology: some degree has torsion
    """

    def __init__(self, complex_: FiniteComplex):
        complex_.check()
        self.complex = complex_
        self._degrees = {}
        generators = []
        for s in complex_.degrees():
            piece = complex_.piece(s)
            d_out = complex_.differential(s)
            u, d, v = smith_normal_form(d_out)
            r = len([i for i in range(min(d.shape)) if rows_of(d)[i][i]])
            v_rows = rows_of(v)
            kernel = [[v_rows[i][j] for j in range(r, len(piece))] for i in range(len(piece))]
            v_inv = unimodular_inverse(v)
            boundaries = matmul(v_inv, complex_.differential(s - 1))
            b_rows = rows_of(boundaries)[r:]
            z = len(piece) - r
            k = int_matrix(b_rows, (z, complex_.dimension(s - 1)))
            u2, d2, _ = smith_normal_form(k)
            factors = [abs(rows_of(d2)[i][i]) for i in range(min(d2.shape)) if rows_of(d2)[i][i]]
            torsion = [f for f in factors if f > 1]
            if torsion:
                raise NonFreeCohomology(f"degree {s} of {complex_.name or 'complex'} has torsion {torsion}")
            r2 = len(factors)
            u2_inv = rows_of(unimodular_inverse(u2))
            reps = []
            for j in range(r2, z):
                coords = [u2_inv[i][j] for i in range(z)]
                vector = [sum(kernel[i][t] * coords[t] for t in range(z)) for i in range(len(piece))]
                reps.append(piece.element(vector))
            self._degrees[s] = (r, rows_of(v_inv), rows_of(u2), r2, reps)
            for j, rep in enumerate(reps):
                generators.append((self._name(rep, s, j), rep))
        self.basis = Basis(Generator(name, rep.degree, min_filtration(rep), *tags_of(rep))
                           for name, rep in generators)
        self._representatives = {g: rep for g, (_, rep) in zip(self.basis, generators)}

    @staticmethod
    def _name(rep: Element, s: int, j: int) -> str:
        if len(rep) == 1:
            g, c = next(iter(rep))
            if c == 1:
                return g.name
        source, target = tags_of(rep)
        if source is None and target is None:
            return f"h{s}_{j}"
        # object tags keep block-wise classes apart
        return f"h{s}_{j}@{source}-{target}"

    def representative(self, generator: Generator) -> Element:
        return self._representatives[generator]

    def rank(self, s: int) -> int:
        return len(self._degrees.get(s, (0, [], [], 0, []))[4])

    def project(self, cycle: Element) -> Element:
        """Cohomology class of a cycle in the cohomology basis."""
        result = Element()
        by_degree = defaultdict(list)
        for g, c in cycle:
            by_degree[g.degree].append((g, c))
        for s, terms in by_degree.items():
            if s not in self._degrees:
                continue
            r, v_inv, u2, r2, reps = self._degrees[s]
            piece = self.complex.piece(s)
            vector = piece.vector(Element(dict(terms)))
            coords = [sum(v_inv[i][t] * vector[t] for t in range(len(piece))) for i in range(r, len(piece))]
            reduced = [sum(u2[i][t] * coords[t] for t in range(len(coords))) for i in range(len(coords))]
            names = [g for g in self.basis if g.degree == s]
            result = result + Element(dict(zip(names, reduced[r2:])))
        return result


def min_filtration(element: Element):
    value = element.min_filtration()
    return value if value is not None else 0


def tags_of(element: Element) -> Tuple[Optional[str], Optional[str]]:
    sources = {g.source for g in element.support}
    targets = {g.target for g in element.support}
    return (sources.pop() if len(sources) == 1 else None,
            targets.pop() if len(targets) == 1 else None)


def block_models(basis: Basis, op: MultilinearOp, name: str = "") -> Tuple[Basis, Dict[Generator, Element], "BlockProjection"]:
    """
    Cohomology models of an operation computed per object block.

    Generators sharing (source, target) tags form one block, so representatives
    stay inside a single hom space.
    """
    blocks = defaultdict(list)
    for g in basis:
        blocks[(g.source, g.target)].append(g)
    models = []
    for tags, gens in sorted(blocks.items(), key=lambda item: basis.order(item[1][0])):
        sub = Basis(gens)
        complex_ = FiniteComplex.from_operation(sub, op.restricted(lambda key: key[0] in sub), f"{name}{tags}")
        models.append((sub, HomologyModel(complex_)))
    combined = Basis(g for _, model in models for g in model.basis)
    reps = {g: model.representative(g) for _, model in models for g in model.basis}
    return combined, reps, BlockProjection(models)


class BlockProjection:
    """Projection of cycles to cohomology for block-wise models."""

    def __init__(self, models: Sequence[Tuple[Basis, HomologyModel]]):
        self._models = list(models)

    def __call__(self, cycle: Element) -> Element:
        result = Element()
        for sub, model in self._models:
            result = result + model.project(cycle.project(lambda g: g in sub))
        return result
