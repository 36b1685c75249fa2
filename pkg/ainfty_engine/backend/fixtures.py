"""
Programmatic fixtures: small algebras and modules with known answers.
"""

import itertools
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .ainfty import CurvedAInfAlgebra, from_dga
from .core import Basis, Element, Generator, MultilinearOp
from .homology import int_matrix, rows_of, unimodular_inverse
from .modcat import LEFT, AInfModule, deform_module, transport_module, yoneda_left

logger = logging.getLogger("Fixtures")


def s1() -> CurvedAInfAlgebra:
    """
    Curved algebra with unit e, m0 = c and m1(x) = -c.

    The bounding cochain for the module of ``s1_module`` is x.
    """
    e = Generator("e", 0, 0)
    x = Generator("x", 1, 1)
    c = Generator("c", 2, 1)
    product = {(e, e): Element.of(e), (e, x): Element.of(x), (x, e): Element.of(x),
               (e, c): Element.of(c), (c, e): Element.of(c)}
    return from_dga(Basis([e, x, c]), product, {x: Element.of(c)}, [e], Element.of(c), "S1")


def s1_module(A: Optional[CurvedAInfAlgebra] = None) -> AInfModule:
    """Copy of S1 with primed generators: n1(g; h') = m2(g, h)', n0(u) = -dx, n0(dx) = -dc."""
    A = A or s1()
    prime = {"e": "u", "x": "dx", "c": "dc"}
    basis = Basis(g.renamed(prime[g.name]) for g in A.basis)

    def primed(value: Element) -> Element:
        return Element({basis.get(prime[g.name]): c for g, c in value})

    n1 = {(g, basis.get(prime[h.name])): primed(value) for (g, h), value in A.op(2).table.items()}
    n0 = {(basis.get("u"),): Element.of(basis.get("dx"), -1), (basis.get("dx"),): Element.of(basis.get("dc"), -1)}
    return AInfModule(A, basis, {0: MultilinearOp(1, 1, n0), 1: MultilinearOp(2, 0, n1)}, LEFT, "D", 1)


def _monomial_name(subset: Tuple[int, ...]) -> str:
    return "".join(f"x{i}" for i in subset) if subset else "e"


def _wedge_sign(left: Tuple[int, ...], right: Tuple[int, ...]) -> int:
    if set(left) & set(right):
        return 0
    inversions = sum(1 for a in left for b in right if a > b)
    return (-1) ** inversions


def exterior_algebra(n: int, filtrations: Optional[Sequence[Fraction]] = None,
                     differential: Optional[Dict[int, Dict[Tuple[int, ...], int]]] = None,
                     name: Optional[str] = None) -> CurvedAInfAlgebra:
    """
    Exterior algebra on x1..xn in degree 1.

    Args:
        n: Number of degree-one generators
        filtrations: Level of each xi; a monomial sits at the sum
        differential: i -> {monomial: coefficient}, extended as a derivation
        name: Document name
    """
    levels = [Fraction(f) for f in (filtrations or [0] * n)]
    subsets = [s for size in range(n + 1) for s in itertools.combinations(range(1, n + 1), size)]
    gens = {s: Generator(_monomial_name(s), len(s), sum((levels[i - 1] for i in s), Fraction(0)))
            for s in subsets}
    basis = Basis(gens[s] for s in subsets)

    def multiply(left: Tuple[int, ...], right: Tuple[int, ...]) -> Element:
        sign = _wedge_sign(left, right)
        return Element.of(gens[tuple(sorted(left + right))], sign) if sign else Element()

    product = {}
    for a in subsets:
        for b in subsets:
            value = multiply(a, b)
            if value:
                product[(gens[a], gens[b])] = value

    d = {}
    for s in subsets:
        total = Element()
        for position, i in enumerate(s):
            for monomial, coeff in (differential or {}).get(i, {}).items():
                before, after = s[:position], s[position + 1:]
                term = Element()
                for g, c in multiply(before, monomial):
                    inner = next(t for t in subsets if gens[t] == g)
                    term = term + multiply(inner, after) * c
                total = total + term * (coeff * (-1) ** position)
        if total:
            d[gens[s]] = total
    return from_dga(basis, product, d, [gens[()]], None, name or f"Lambda{n}")


def group_ring(n: int) -> CurvedAInfAlgebra:
    """Z[Z/n] in degree 0 with unit g0."""
    gens = [Generator(f"g{i}", 0) for i in range(n)]
    product = {(gens[i], gens[j]): Element.of(gens[(i + j) % n]) for i in range(n) for j in range(n)}
    return from_dga(Basis(gens), product, {}, [gens[0]], None, f"ZZ{n}")


def truncated_polynomial(n: int = 2, degree: int = 0) -> CurvedAInfAlgebra:
    """Z[t]/t^n with t in an even degree."""
    if degree % 2:
        raise ValueError("t must have even degree")
    gens = [Generator("one" if i == 0 else ("t" if i == 1 else f"t{i}"), i * degree) for i in range(n)]
    product = {(gens[i], gens[j]): Element.of(gens[i + j]) for i in range(n) for j in range(n) if i + j < n}
    return from_dga(Basis(gens), product, {}, [gens[0]], None, f"Zt{n}")


def linear_quiver(n: int) -> CurvedAInfAlgebra:
    """
    Path algebra of the directed quiver 0 -> 1 -> ... -> n-1.

    Idempotents e<i> and paths f<i><j> (i < j) from i to j, all in degree 0.
    """
    paths = {}
    for i in range(n):
        paths[(i, i)] = Generator(f"e{i}", 0, 0, str(i), str(i))
    for i in range(n):
        for j in range(i + 1, n):
            paths[(i, j)] = Generator(f"f{i}{j}", 0, 0, str(i), str(j))
    product = {}
    for (j, k), left in paths.items():
        for (i, jj), right in paths.items():
            if jj == j:
                product[(left, right)] = Element.of(paths[(i, k)])
    units = [paths[(i, i)] for i in range(n)]
    return from_dga(Basis(paths.values()), product, {}, units, None, f"A{n}")


def non_associative() -> CurvedAInfAlgebra:
    """m2 with (a a) a != a (a a); fails the arity-three relation."""
    e, a, b = Generator("e", 0), Generator("a", 0), Generator("b", 0)
    product = {(a, a): Element.of(b), (b, a): Element.of(e)}
    return from_dga(Basis([e, a, b]), product, {}, [], None, "nonassoc")


def conjugated_yoneda(A: CurvedAInfAlgebra, Y: Optional[str] = None, seed: int = 0) -> AInfModule:
    """Yoneda module of Y transported by a random unipotent change of basis inside each block."""
    rng = random.Random(seed)
    Yl = yoneda_left(A, Y)
    blocks: Dict[Tuple, List[Generator]] = {}
    for g in Yl.basis:
        blocks.setdefault((g.degree, g.source, g.target), []).append(g)
    phi, phi_inverse = {}, {}
    for gens in blocks.values():
        size = len(gens)
        matrix = [[int(i == j) if i >= j else rng.randint(-2, 2) for j in range(size)] for i in range(size)]
        matrix = [list(r) for r in zip(*matrix)]
        inverse = rows_of(unimodular_inverse(int_matrix(matrix, (size, size))))
        for j, g in enumerate(gens):
            phi[g] = Element({gens[i]: matrix[i][j] for i in range(size)})
            phi_inverse[g] = Element({gens[i]: inverse[i][j] for i in range(size)})
    return transport_module(Yl, phi, phi_inverse, f"{Yl.name}~")


def with_extra_generator(M: AInfModule, degree: int = 0) -> AInfModule:
    """M plus a generator on which every operation vanishes; cohomology ranks grow by one."""
    tag = next(iter(M.basis)).target if len(M.basis) else None
    z = Generator("z", degree, 0, None, tag)
    return AInfModule(M.algebra, Basis(list(M.basis) + [z]), M.ops, M.side, f"{M.name}+z", M.kmax)


@dataclass
class MaurerCartanFixture:
    """Curved algebra C, module D over C with cyclic element u, and the bounding cochain b."""
    algebra: CurvedAInfAlgebra
    module: AInfModule
    u: Element
    b: Element
    flat: CurvedAInfAlgebra


def random_mc_fixture(seed: int) -> MaurerCartanFixture:
    """
    Deform a filtered exterior dga and its diagonal module by a random beta.

    The undeformed unit is a cyclic element of the deformed module and the
    bounding cochain is -beta.
    """
    rng = random.Random(seed)
    n = rng.choice((2, 3))
    levels = [Fraction(rng.randint(1, 3)) for _ in range(n)]
    k = rng.choice((-2, -1, 1, 2))
    if n == 2:
        differential = {2: {(1, 2): k}}
    else:
        levels[2] = min(levels[2], levels[0] + levels[1])
        differential = {3: {(1, 2): k}}
    A = exterior_algebra(n, levels, differential, f"Lambda{n}s{seed}")
    coeffs = [rng.randint(-5, 5) for _ in range(n)]
    if coeffs[-1] == 0:
        coeffs[-1] = rng.choice((-3, 3))
    degree_one = A.basis.restrict(lambda g: g.degree == 1)
    beta = degree_one.element(coeffs)
    D = deform_module(yoneda_left(A), beta)
    u = Element.of(D.basis.get("e"))
    logger.debug(f"MC fixture {seed}: beta = {A.basis.format_element(beta)}")
    return MaurerCartanFixture(D.algebra, D, u, -beta, A)


def random_curved_algebra(seed: int) -> CurvedAInfAlgebra:
    return random_mc_fixture(seed).algebra


def relation_corpus() -> List[CurvedAInfAlgebra]:
    """Structures expected to pass check_relations."""
    corpus = [group_ring(n) for n in range(1, 7)]
    corpus += [exterior_algebra(n) for n in range(1, 4)]
    corpus += [s1(), linear_quiver(2), linear_quiver(3), truncated_polynomial(3)]
    corpus += [random_curved_algebra(seed) for seed in range(5)]
    return corpus