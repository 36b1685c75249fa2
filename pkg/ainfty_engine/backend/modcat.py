"""
A-infinity modules and bimodules.
Yoneda modules, deformation by Maurer-Cartan elements, pre-module
homomorphisms and their differential, truncated hom complexes, the
lambda comparison map, module-valued functors of bimodules,
representability detection and tensor products of dgas.
"""

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .ainfty import (CurvedAInfAlgebra, RelationReport, Residual, check_mc_element,
                     classical_differential, classical_product, default_max_arity,
                     deform, from_dga, residual_records, with_variant_diagnosis)
from .core import (Basis, Element, Generator, MultilinearOp, SignRule, TypedOp,
                   composable, composable_tuples, compose_insert, evaluate,
                   insert_elements, insertion_residuals)
from .errors import (DegreeMismatch, MissingUnit, NotDG, RelationFailure,
                     UnknownGenerator)
from .homology import (ChainMap, FiniteComplex, HomologyModel, cohomology, is_quasi_iso)

logger = logging.getLogger("ModCat")

LEFT = "left"
RIGHT = "right"


def _check_table(op: MultilinearOp, pools: Sequence[Basis], outputs: Basis, label: str):
    for inputs, value in op.table.items():
        for g, pool in zip(inputs, pools):
            if g not in pool:
                raise UnknownGenerator(f"{g.name} is not a valid input of {label}")
        for g in value.support:
            if g not in outputs:
                raise UnknownGenerator(f"{g.name} is not a valid output of {label}")


class AInfModule:
    """
    Left or right A-infinity module over a curved algebra.

    ``ops[k]`` is n^k with k algebra inputs and one module input; the module
    input is written last for left modules and first for right modules.
    """

    def __init__(self, algebra: CurvedAInfAlgebra, basis: Basis, ops: Mapping[int, MultilinearOp],
                 side: str = LEFT, name: str = "", kmax: Optional[int] = None):
        if side not in (LEFT, RIGHT):
            raise ValueError(f"unknown module side {side}")
        self.algebra = algebra
        self.basis = basis
        self.side = side
        self.name = name
        self.kmax = kmax if kmax is not None else max(ops, default=0)
        self.curved_yoneda = False
        self.ops: Dict[int, MultilinearOp] = {}
        for k, op in sorted(ops.items()):
            if op.arity != k + 1:
                raise DegreeMismatch(f"n{k} has arity {op.arity}")
            if op and op.intrinsic_degree != 1 - k:
                raise DegreeMismatch(f"n{k} has intrinsic degree {op.intrinsic_degree}, expected {1 - k}")
            _check_table(op, self._pools(k), basis, f"n{k}")
            if op:
                self.ops[k] = op

    def __repr__(self):
        return f"AInfModule({self.name!r}, {self.side}, rank={len(self.basis)})"

    def _pools(self, k: int) -> Tuple[Basis, ...]:
        if self.side == LEFT:
            return (self.algebra.basis,) * k + (self.basis,)
        return (self.basis,) + (self.algebra.basis,) * k

    def kinds(self, k: int) -> Tuple[str, ...]:
        return ("a",) * k + ("m",) if self.side == LEFT else ("m",) + ("a",) * k

    def op(self, k: int) -> MultilinearOp:
        return self.ops.get(k) or MultilinearOp.zero(k + 1, 1 - k)

    def typed_ops(self) -> List[TypedOp]:
        return [TypedOp(op, self.kinds(k), "m") for k, op in self.ops.items()]

    def with_ops(self, ops: Mapping[int, MultilinearOp], algebra: Optional[CurvedAInfAlgebra] = None,
                 name: Optional[str] = None) -> "AInfModule":
        return AInfModule(algebra or self.algebra, self.basis, ops, self.side,
                          self.name if name is None else name, self.kmax)

    def at(self, obj: Optional[str]) -> Basis:
        """Generators of the value of the module at an object."""
        return self.basis.restrict(lambda g: g.target == obj) if self.side == LEFT else \
            self.basis.restrict(lambda g: g.source == obj)

    def complex_at(self, obj: Optional[str]) -> FiniteComplex:
        piece = self.at(obj)
        return FiniteComplex.from_operation(piece, self.op(0).restricted(lambda key: key[0] in piece),
                                            f"{self.name}({obj})")

    def filtration_violations(self):
        return [(k, inputs, g) for k, op in self.ops.items() for inputs, g in op.filtration_violations()]


class AInfBimodule:
    """
    A-infinity bimodule.

    ``ops[(k, l)]`` is n^{k,l} on (b_k, ..., b_1, p, a_l, ..., a_1) with b in
    the left algebra and a in the right algebra. A generator's source is a
    right-algebra object and its target a left-algebra object.
    """

    def __init__(self, left: CurvedAInfAlgebra, right: CurvedAInfAlgebra, basis: Basis,
                 ops: Mapping[Tuple[int, int], MultilinearOp], name: str = "", kmax: Optional[int] = None):
        self.left = left
        self.right = right
        self.basis = basis
        self.name = name
        self.kmax = kmax if kmax is not None else max((k + l for k, l in ops), default=0)
        self.ops: Dict[Tuple[int, int], MultilinearOp] = {}
        for (k, l), op in sorted(ops.items()):
            if op.arity != k + l + 1:
                raise DegreeMismatch(f"n{k},{l} has arity {op.arity}")
            if op and op.intrinsic_degree != 1 - k - l:
                raise DegreeMismatch(f"n{k},{l} has intrinsic degree {op.intrinsic_degree}, expected {1 - k - l}")
            _check_table(op, (left.basis,) * k + (basis,) + (right.basis,) * l, basis, f"n{k},{l}")
            if op:
                self.ops[(k, l)] = op

    def __repr__(self):
        return f"AInfBimodule({self.name!r}, rank={len(self.basis)})"

    def op(self, k: int, l: int) -> MultilinearOp:
        return self.ops.get((k, l)) or MultilinearOp.zero(k + l + 1, 1 - k - l)

    def typed_ops(self) -> List[TypedOp]:
        return [TypedOp(op, ("l",) * k + ("m",) + ("r",) * l, "m") for (k, l), op in self.ops.items()]

    def with_ops(self, ops, left=None, right=None, name=None) -> "AInfBimodule":
        return AInfBimodule(left or self.left, right or self.right, self.basis, ops,
                            self.name if name is None else name, self.kmax)


def _algebra_as(algebra: CurvedAInfAlgebra, kind: str) -> List[TypedOp]:
    return [TypedOp(op, (kind,) * k, kind) for k, op in algebra.ops.items()]


def _expected_curved_pattern(M: AInfModule) -> Dict[Tuple[Tuple[int, ...], Tuple[Generator, ...]], Element]:
    """
    Residual left by the curvature of the algebra on a Yoneda module.

    The curvature term inserted beyond the module input has no module
    counterpart, so the module relation equals minus that term.
    """
    A = M.algebra
    m0 = A.op(0)
    expected = {}
    if not m0:
        return expected
    for j, op in A.ops.items():
        if j < 2:
            continue
        position = 0 if M.side == LEFT else j - 1
        term = compose_insert(op, m0, position)
        for inputs, value in term.table.items():
            module_input = inputs[-1] if M.side == LEFT else inputs[0]
            if module_input in M.basis:
                key = ((len(inputs) - 1,), inputs)
                expected[key] = expected.get(key, Element()) - value
    return expected


def module_residuals(M: AInfModule, max_arity: int, rule: SignRule = SignRule.REDUCED) -> Tuple[Residual, ...]:
    inners = M.typed_ops() + _algebra_as(M.algebra, "a")
    sums = insertion_residuals(M.typed_ops(), inners, lambda kinds: kinds.count("a") <= max_arity, rule)
    return residual_records(sums, lambda kinds: (kinds.count("a"),), M.basis.order)


def check_module_relations(M: AInfModule, max_arity: Optional[int] = None) -> RelationReport:
    """
    Check the curved module relations up to a number of algebra inputs.

    For Yoneda modules of curved algebras, residuals that match the pattern
    produced by the curvature are reported as curved-consistent instead.

    Args:
        M: Module
        max_arity: Largest number of algebra inputs; defaults to kmax + 2

    Returns:
        Relation report
    """
    if max_arity is None:
        max_arity = default_max_arity(M.kmax)
    found = module_residuals(M, max_arity)
    expected = _expected_curved_pattern(M) if M.curved_yoneda else {}
    residuals, consistent = [], []
    seen = set()
    for residual in found:
        key = (residual.arity, residual.inputs)
        seen.add(key)
        if key in expected and expected[key] == residual.value:
            consistent.append(residual)
        else:
            residuals.append(Residual(residual.arity, residual.inputs, residual.value - expected.get(key, Element())))
    for key, value in expected.items():
        if key not in seen and value and key[0][0] <= max_arity:
            residuals.append(Residual(key[0], key[1], -value))
    if consistent:
        logger.warning(f"{M.name or 'module'}: {len(consistent)} curved-consistent residuals")
    variant = with_variant_diagnosis(lambda rule: module_residuals(M, max_arity, rule), tuple(residuals),
                                     M.name or "module") if not expected else None
    return RelationReport(tuple(residuals), tuple(consistent), variant)


def bimodule_residuals(P: AInfBimodule, max_arity: int, rule: SignRule = SignRule.REDUCED) -> Tuple[Residual, ...]:
    inners = P.typed_ops() + _algebra_as(P.left, "l") + _algebra_as(P.right, "r")
    sums = insertion_residuals(P.typed_ops(), inners,
                               lambda kinds: kinds.count("l") + kinds.count("r") <= max_arity, rule)
    return residual_records(sums, lambda kinds: (kinds.count("l"), kinds.count("r")), P.basis.order)


def check_bimodule_relations(P: AInfBimodule, max_arity: Optional[int] = None) -> RelationReport:
    """Check the curved bimodule relations up to a total number of algebra inputs."""
    if max_arity is None:
        max_arity = default_max_arity(P.kmax)
    residuals = bimodule_residuals(P, max_arity)
    variant = with_variant_diagnosis(lambda rule: bimodule_residuals(P, max_arity, rule), residuals,
                                     P.name or "bimodule")
    return RelationReport(residuals, (), variant)


def check_module_unit(M: AInfModule) -> bool:
    """
    Strict unitality of a module.

    Left: n1(e; y) = (-1)^|y| y. Right: n1(y; e) = y. Operations with two or
    more algebra inputs vanish as soon as one of them is a unit.
    """
    A = M.algebra
    if not A.units:
        raise MissingUnit(f"{A.name or 'algebra'} has no unit")
    n1 = M.op(1)
    for y in M.basis:
        for e in A.units:
            if M.side == LEFT:
                inputs = (Element.of(e), Element.of(y))
                expected = Element.of(y, (-1) ** y.degree) if composable((e, y)) else Element()
            else:
                inputs = (Element.of(y), Element.of(e))
                expected = Element.of(y) if composable((y, e)) else Element()
            if evaluate(n1, inputs) != expected:
                logger.debug(f"unit {e.name} fails on module generator {y.name}")
                return False
    for k, op in M.ops.items():
        if k >= 2 and any(u in inputs for inputs in op.table for u in A.units):
            return False
    return True


def yoneda_left(A: CurvedAInfAlgebra, Y: Optional[str] = None) -> AInfModule:
    """
    Left Yoneda module hom(Y, -).

    n^k(a_k, ..., a_1, b) = m^{k+1}(a_k, ..., a_1, b) on generators b with source Y.
    """
    basis = A.basis.restrict(lambda g: g.source == Y)
    ops = {}
    for j, op in A.ops.items():
        if j >= 1:
            ops[j - 1] = MultilinearOp(j, 2 - j, {k: v for k, v in op.table.items() if k[-1] in basis})
    module = AInfModule(A, basis, ops, LEFT, f"Y({Y})" if Y is not None else "Y", A.kmax - 1)
    module.curved_yoneda = not A.is_flat()
    return module


def yoneda_right(A: CurvedAInfAlgebra, Y: Optional[str] = None) -> AInfModule:
    """Right Yoneda module hom(-, Y): n^k(b, a_k, ..., a_1) = m^{k+1}(b, a_k, ..., a_1)."""
    basis = A.basis.restrict(lambda g: g.target == Y)
    ops = {}
    for j, op in A.ops.items():
        if j >= 1:
            ops[j - 1] = MultilinearOp(j, 2 - j, {k: v for k, v in op.table.items() if k[0] in basis})
    module = AInfModule(A, basis, ops, RIGHT, f"Yr({Y})" if Y is not None else "Yr", A.kmax - 1)
    module.curved_yoneda = not A.is_flat()
    return module


def diagonal_bimodule(A: CurvedAInfAlgebra) -> AInfBimodule:
    """A over (A, A) with n^{k,l} = m^{k+l+1}."""
    ops = {}
    for j, op in A.ops.items():
        for k in range(j):
            ops[(k, j - 1 - k)] = MultilinearOp(j, 2 - j, op.table)
    return AInfBimodule(A, A, A.basis, ops, f"{A.name}-diag" if A.name else "diag", A.kmax - 1)


def deform_module(M: AInfModule, b: Element) -> AInfModule:
    """
    Deform a module by inserting b into algebra inputs.

    Raises:
        WrongDegree: b is not homogeneous of degree 1
        RelationFailure: b is Maurer-Cartan but n^{0;b} does not square to zero
    """
    check_mc_element(M.algebra.basis, b)
    if not b:
        return M
    algebra = deform(M.algebra, b)
    sums, depth = insert_elements(M.typed_ops(), {"a": b})
    ops = {kinds.count("a"): op for kinds, op in sums.items()}
    deformed = M.with_ops(ops, algebra, f"{M.name}^b" if M.name else "")
    logger.debug(f"Deformed module {M.name or ''} by {b}: {depth} insertions survive")
    if algebra.is_flat():
        n0 = [TypedOp(deformed.op(0), ("m",), "m")]
        if any(insertion_residuals(n0, n0, lambda kinds: True).values()):
            raise RelationFailure("n0 of the deformed module does not square to zero")
    return deformed


def deform_bimodule(P: AInfBimodule, b0: Element, b1: Element) -> AInfBimodule:
    """
    Deform a bimodule by b0 on the left and b1 on the right.

    Raises:
        WrongDegree: b0 or b1 is not homogeneous of degree 1
        RelationFailure: both are Maurer-Cartan but n^{0,0} does not square to zero
    """
    check_mc_element(P.left.basis, b0)
    check_mc_element(P.right.basis, b1)
    if not b0 and not b1:
        return P
    left, right = deform(P.left, b0), deform(P.right, b1)
    insertions = {}
    if b0:
        insertions["l"] = b0
    if b1:
        insertions["r"] = b1
    sums, _ = insert_elements(P.typed_ops(), insertions)
    ops = {(kinds.count("l"), kinds.count("r")): op for kinds, op in sums.items()}
    deformed = P.with_ops(ops, left, right, f"{P.name}^b" if P.name else "")
    if left.is_flat() and right.is_flat():
        n00 = [TypedOp(deformed.op(0, 0), ("m",), "m")]
        if any(insertion_residuals(n00, n00, lambda kinds: True).values()):
            raise RelationFailure("n0,0 of the deformed bimodule does not square to zero")
    return deformed


class PreModuleHom:
    """
    Pre-module homomorphism between left modules over one algebra.

    ``components[d]`` has d - 1 algebra inputs and one module input; a
    component of degree |t| has intrinsic degree |t| - (d - 1).
    """

    def __init__(self, source: AInfModule, target: AInfModule, degree: int,
                 components: Optional[Mapping[int, MultilinearOp]] = None):
        self.source = source
        self.target = target
        self.degree = degree
        self.components: Dict[int, MultilinearOp] = {}
        for d, op in sorted((components or {}).items()):
            if not op:
                continue
            if op.arity != d:
                raise DegreeMismatch(f"component {d} has arity {op.arity}")
            if op.intrinsic_degree != degree - (d - 1):
                raise DegreeMismatch(f"component {d} has intrinsic degree {op.intrinsic_degree}, "
                                     f"expected {degree - (d - 1)}")
            self.components[d] = op

    def __repr__(self):
        return f"PreModuleHom(degree={self.degree}, components={sorted(self.components)})"

    def __bool__(self):
        return bool(self.components)

    def __eq__(self, other):
        if not isinstance(other, PreModuleHom):
            return NotImplemented
        if not self and not other:
            return True
        return self.degree == other.degree and self.components == other.components

    def component(self, d: int) -> MultilinearOp:
        return self.components.get(d) or MultilinearOp.zero(d, self.degree - (d - 1))

    def __add__(self, other: "PreModuleHom") -> "PreModuleHom":
        if self and other and self.degree != other.degree:
            raise DegreeMismatch("cannot add pre-module homs of different degree")
        degree = self.degree if self else other.degree
        components = dict(self.components)
        for d, op in other.components.items():
            components[d] = components[d] + op if d in components else op
        return PreModuleHom(self.source, self.target, degree, components)

    def scaled(self, scalar: int) -> "PreModuleHom":
        return PreModuleHom(self.source, self.target, self.degree,
                            {d: op.scaled(scalar) for d, op in self.components.items()})

    def __neg__(self):
        return self.scaled(-1)

    def truncated(self, length: int) -> "PreModuleHom":
        return PreModuleHom(self.source, self.target, self.degree,
                            {d: op for d, op in self.components.items() if d <= length + 1})


def mu1(t: PreModuleHom, length: Optional[int] = None) -> PreModuleHom:
    """
    First structure map of the module category applied to t.

    Args:
        t: Pre-module homomorphism
        length: Drop components with more than ``length`` algebra inputs

    Returns:
        n_N(..., t(...)) + (-1)^(|t|-1) (t(..., n_M(...)) + t(..., m(...), ...))
    """
    A = t.source.algebra
    sign = (-1) ** (t.degree - 1)
    sums: Dict[int, MultilinearOp] = {}

    def add(op: MultilinearOp):
        if op and (length is None or op.arity <= length + 1):
            sums[op.arity] = sums[op.arity] + op if op.arity in sums else op

    for comp in t.components.values():
        for n in t.target.ops.values():
            add(compose_insert(n, comp, 0))
        for n in t.source.ops.values():
            add(compose_insert(comp, n, 0).scaled(sign))
        for m in A.ops.values():
            for position in range(1, comp.arity):
                add(compose_insert(comp, m, position).scaled(sign))
    return PreModuleHom(t.source, t.target, t.degree + 1, sums)


def hom_differential(t: PreModuleHom, length: Optional[int] = None) -> PreModuleHom:
    """Differential of the hom complex, D = -mu1, which makes lambda a chain map."""
    return -mu1(t, length)


def lambda_map(M: AInfModule, Y: Optional[str], c: Element, length: Optional[int] = None) -> PreModuleHom:
    """
    lambda(c) from the left Yoneda module of Y into M.

    lambda(c)(a_k, ..., a_1, b) = n^{k+1}(a_k, ..., a_1, b, c)

    Args:
        M: Left module
        Y: Object with c in M(Y)
        c: Homogeneous element of M(Y)
        length: Optional truncation of the number of algebra inputs
    """
    piece = M.at(Y)
    for g, _ in c:
        if g not in piece:
            raise UnknownGenerator(f"{g.name} is not a generator of {M.name or 'the module'} at {Y}")
    source = yoneda_left(M.algebra, Y)
    if not c:
        return PreModuleHom(source, M, 0)
    degree = c.degree
    components = {}
    for j, op in M.ops.items():
        if j == 0 or (length is not None and j - 1 > length):
            continue
        table = defaultdict(Element)
        for inputs, value in op.table.items():
            coeff = c.coefficient(inputs[-1])
            if coeff:
                table[inputs[:-1]] = table[inputs[:-1]] + value * coeff
        components[j] = MultilinearOp(j, degree - (j - 1), table)
    return PreModuleHom(source, M, degree, components)


ElementaryKey = Tuple[Tuple[Generator, ...], Generator]


def _output_matches(inputs: Tuple[Generator, ...], out: Generator) -> bool:
    head = inputs[0]
    return head.target is None or out.target is None or head.target == out.target


def elementary_keys(algebra_basis: Basis, source: Basis, target: Basis, k: int,
                    skip: Sequence[Generator] = ()) -> List[ElementaryKey]:
    """Elementary maps with k algebra inputs, skipping tuples that use a unit."""
    pools = [[a for a in algebra_basis if a not in skip]] * k + [list(source)]
    keys = []
    for inputs in composable_tuples(pools):
        keys.extend((inputs, out) for out in target if _output_matches(inputs, out))
    return keys


def _key_degree(key: ElementaryKey) -> int:
    inputs, out = key
    return out.degree - sum(g.degree for g in inputs) + len(inputs) - 1


def _key_name(key: ElementaryKey) -> str:
    inputs, out = key
    return f"{'.'.join(g.name for g in inputs)}->{out.name}"


class HomComplex:
    """
    Length-truncated hom complex between left modules.

    Cochains with more than ``length`` algebra inputs are dropped; when
    ``normalized`` is set, cochains vanish on tuples containing a unit.
    """

    def __init__(self, source: AInfModule, target: AInfModule, length: int, normalized: bool = True):
        self.source = source
        self.target = target
        self.length = length
        self.normalized = normalized
        A = source.algebra
        skip = A.units if normalized else ()
        keys = []
        for k in range(length + 1):
            keys.extend(elementary_keys(A.basis, source.basis, target.basis, k, skip))
        by_degree = defaultdict(list)
        for key in keys:
            by_degree[_key_degree(key)].append(key)
        self._generators: Dict[ElementaryKey, Generator] = {}
        self._keys: Dict[Generator, ElementaryKey] = {}
        pieces = {}
        for g, group in sorted(by_degree.items()):
            gens = []
            for key in group:
                gen = Generator(_key_name(key), g)
                self._generators[key] = gen
                self._keys[gen] = key
                gens.append(gen)
            pieces[g] = Basis(gens)
        differentials = {}
        for g, piece in pieces.items():
            target_piece = pieces.get(g + 1, Basis())
            matrix = [[0] * len(piece) for _ in range(len(target_piece))]
            for j, gen in enumerate(piece):
                image = self.element(hom_differential(self.hom(Element.of(gen)), length))
                for h, c in image:
                    matrix[target_piece.index(h)][j] = c
            differentials[g] = matrix
        self.complex = FiniteComplex(pieces, differentials,
                                     f"hom({source.name},{target.name})<={length}")
        logger.debug(f"Built {self.complex}")

    def key(self, generator: Generator) -> ElementaryKey:
        return self._keys[generator]

    def hom(self, element: Element) -> PreModuleHom:
        """Pre-module hom with the given coordinates."""
        if not element:
            return PreModuleHom(self.source, self.target, 0)
        degree = element.degree
        tables = defaultdict(dict)
        for gen, c in element:
            inputs, out = self._keys[gen]
            table = tables[len(inputs)]
            table[inputs] = table.get(inputs, Element()) + Element.of(out, c)
        components = {d: MultilinearOp(d, degree - (d - 1), table) for d, table in tables.items()}
        return PreModuleHom(self.source, self.target, degree, components)

    def element(self, t: PreModuleHom) -> Element:
        """
        Coordinates of a pre-module hom.

        Raises:
            RelationFailure: t has a nonzero value outside the (normalized) complex
        """
        terms = {}
        for d, op in t.components.items():
            if d > self.length + 1:
                continue
            for inputs, value in op.table.items():
                for out, c in value:
                    gen = self._generators.get((inputs, out))
                    if gen is None:
                        raise RelationFailure(f"value on {_key_name((inputs, out))} lies outside the hom complex")
                    terms[gen] = terms.get(gen, 0) + c
        return Element(terms)


def lambda_chain_map(M: AInfModule, Y: Optional[str], length: int) -> ChainMap:
    """lambda as a chain map from M(Y) into the truncated normalized hom complex."""
    hom = HomComplex(yoneda_left(M.algebra, Y), M, length)
    source = M.complex_at(Y)
    components = {}
    for s in source.degrees():
        piece = source.piece(s)
        target = hom.complex.piece(s)
        matrix = [[0] * len(piece) for _ in range(len(target))]
        for j, c in enumerate(piece):
            for h, v in hom.element(lambda_map(M, Y, Element.of(c), length)):
                matrix[target.index(h)][j] = v
        components[s] = matrix
    return ChainMap(source, hom.complex, components)


def lambda_is_quasi_iso(M: AInfModule, Y: Optional[str], length: int) -> bool:
    """True iff the cone of lambda is acyclic over the integers."""
    return is_quasi_iso(lambda_chain_map(M, Y, length))


class ModuleValuedFunctor:
    """
    Functor from the right algebra of a bimodule to left modules over its left algebra.

    The module at a right-algebra object X is spanned by the generators with
    source X; its structure maps are n^{k,0}.
    """

    def __init__(self, bimodule: AInfBimodule):
        self.bimodule = bimodule
        self.modules: Dict[Optional[str], AInfModule] = {}
        objects = {g.source for g in bimodule.basis}
        for X in sorted(objects, key=lambda o: (o is not None, o or "")):
            basis = bimodule.basis.restrict(lambda g, X=X: g.source == X)
            ops = {k: MultilinearOp(k + 1, 1 - k, {key: v for key, v in op.table.items() if key[-1] in basis})
                   for (k, l), op in bimodule.ops.items() if l == 0}
            self.modules[X] = AInfModule(bimodule.left, basis, ops, LEFT, f"F({X})")

    def module(self, X: Optional[str] = None) -> AInfModule:
        return self.modules[X]

    def component(self, inputs: Sequence[Generator]) -> PreModuleHom:
        """
        Pre-module hom attached to composable right-algebra inputs (a_l, ..., a_1).

        F^l(a_l, ..., a_1)^k(b_k, ..., b_1, p) = n^{k,l}(b_k, ..., b_1, p, a_l, ..., a_1)
        """
        inputs = tuple(inputs)
        l = len(inputs)
        source = self.modules[inputs[0].target] if inputs else None
        target = self.modules[inputs[-1].source] if inputs else None
        degree = sum(a.degree for a in inputs) + 1 - l
        components = {}
        for (k, ll), op in self.bimodule.ops.items():
            if ll != l:
                continue
            table = {key[:k + 1]: v for key, v in op.table.items() if key[k + 1:] == inputs}
            components[k + 1] = MultilinearOp(k + 1, degree - k, table)
        return PreModuleHom(source, target, degree, components)

    def order_one_residual(self, a: Generator) -> PreModuleHom:
        """mu1(F(a)) + F(m1(a)); zero when the bimodule relations hold over flat algebras."""
        t = self.component((a,))
        residual = mu1(t)
        m1a = evaluate(self.bimodule.right.op(1), (Element.of(a),))
        for c, coeff in m1a:
            residual = residual + self.component((c,)).scaled(coeff)
        return residual

    def order_one_residuals(self) -> Dict[Generator, PreModuleHom]:
        found = {}
        for a in self.bimodule.right.basis:
            residual = self.order_one_residual(a)
            if residual:
                found[a] = residual
        return found


def bimodule_to_functor(P: AInfBimodule) -> ModuleValuedFunctor:
    return ModuleValuedFunctor(P)


def transport_module(M: AInfModule, phi: Mapping[Generator, Element],
                     phi_inverse: Mapping[Generator, Element], name: Optional[str] = None) -> AInfModule:
    """
    Conjugate a left module by a degree-preserving change of basis.

    n'(a, ..., y) = phi(n(a, ..., phi^-1(y)))
    """
    def apply_phi(value: Element) -> Element:
        return Element.sum(phi.get(g, Element.of(g)) * c for g, c in value)

    pullback = defaultdict(list)
    for y in M.basis:
        for g, c in phi_inverse.get(y, Element.of(y)):
            pullback[g].append((y, c))
    ops = {}
    for k, op in M.ops.items():
        table = defaultdict(Element)
        for inputs, value in op.table.items():
            image = apply_phi(value)
            for y, c in pullback.get(inputs[-1], ()):
                key = inputs[:-1] + (y,)
                table[key] = table[key] + image * c
        ops[k] = MultilinearOp(k + 1, 1 - k, table)
    return M.with_ops(ops, name=name if name is not None else f"{M.name}'")


@dataclass(frozen=True)
class Representability:
    representable: bool
    witness: Optional[PreModuleHom] = None
    reason: str = ""

    def __bool__(self):
        return self.representable


def _homology_signature(complex_: FiniteComplex):
    return {(d.degree, d.betti, d.torsion) for d in cohomology(complex_).degrees if d.betti or d.torsion}


def is_representable_on_object(F: AInfModule, Y: Optional[str], length: int = 4,
                               box: int = 2) -> Representability:
    """
    Decide whether F is quasi-isomorphic to the left Yoneda module of Y.

    Candidate witnesses are lambda(c) for degree-0 cocycles c of F(Y): a
    basis of H^0(F(Y)) when it has rank one, otherwise every combination
    with coefficients in [-box, box].

    Args:
        F: Left module over a flat, strictly unital algebra
        Y: Object
        length: Truncation of the hom complex
        box: Coefficient bound of the search

    Returns:
        Result with the witness T = lambda(c) when representable
    """
    A = F.algebra
    if not A.is_flat():
        return Representability(False, reason="algebra is curved")
    Yl = yoneda_left(A, Y)
    objects = A.objects()
    for Z in objects:
        if _homology_signature(Yl.complex_at(Z)) != _homology_signature(F.complex_at(Z)):
            logger.debug(f"Rank obstruction for {F.name or 'module'} at {Z}")
            return Representability(False, reason=f"homology differs at {Z}")
    model = HomologyModel(F.complex_at(Y))
    classes = [model.representative(h) for h in model.basis if h.degree == 0]
    if not classes:
        return Representability(False, reason="no degree-0 cohomology")
    if len(classes) == 1:
        candidates = [classes[0]]
    else:
        candidates = []
        for coeffs in itertools.product(range(-box, box + 1), repeat=len(classes)):
            if any(coeffs):
                candidates.append(Element.sum(rep * c for rep, c in zip(classes, coeffs)))
    for c in candidates:
        T = lambda_map(F, Y, c, length)
        if hom_differential(T, length):
            continue
        if all(is_quasi_iso(first_component(T, Z)) for Z in objects):
            logger.info(f"{F.name or 'module'} is represented by {Y} via lambda({c})")
            return Representability(True, T, f"lambda({c})")
    return Representability(False, reason="no candidate induces a quasi-isomorphism")


def first_component(T: PreModuleHom, Z: Optional[str]) -> ChainMap:
    """Arity-one component of T as a chain map at the object Z."""
    source, target = T.source.complex_at(Z), T.target.complex_at(Z)
    op = T.component(1)
    components = {}
    for s in source.degrees():
        piece = source.piece(s)
        out = target.piece(s + T.degree)
        matrix = [[0] * len(piece) for _ in range(len(out))]
        for j, b in enumerate(piece):
            for h, c in evaluate(op, (Element.of(b),)):
                matrix[out.index(h)][j] = c
        components[s] = matrix
    return ChainMap(source, target, components)


def _require_dg(A: CurvedAInfAlgebra):
    if not A.is_flat() or any(k >= 3 for k in A.ops):
        raise NotDG(f"{A.name or 'algebra'} is not a dga")


def _tensor_tag(left: Optional[str], right: Optional[str]) -> Optional[str]:
    if left is None and right is None:
        return None
    return f"{left}|{right}"


def _tensor_generators(A: CurvedAInfAlgebra, B: CurvedAInfAlgebra) -> Dict[Tuple[Generator, Generator], Generator]:
    """Generator a|b for each pair, keyed by its factors."""
    pairs = {}
    for a in A.basis:
        for b in B.basis:
            pairs[(a, b)] = Generator(f"{a.name}|{b.name}", a.degree + b.degree, a.filtration + b.filtration,
                                      _tensor_tag(a.source, b.source), _tensor_tag(a.target, b.target))
    return pairs


def tensor_dg(A: CurvedAInfAlgebra, B: CurvedAInfAlgebra) -> CurvedAInfAlgebra:
    """
    Tensor product of dgas.

    d(a|b) = da|b + (-1)^|a| a|db and (a|b)(a'|b') = (-1)^(|b||a'|) aa'|bb'
    in classical signs, converted back to reduced signs.

    Raises:
        NotDG: an input has curvature or operations of arity three or more
    """
    _require_dg(A)
    _require_dg(B)
    pairs = _tensor_generators(A, B)
    basis = Basis(pairs.values())

    def pair_element(x: Element, y: Element, sign: int = 1) -> Element:
        return Element({pairs[(g, h)]: sign * c * e for g, c in x for h, e in y})

    differential = {}
    product = {}
    for (a, b), g in pairs.items():
        da = classical_differential(A, a)
        db = classical_differential(B, b)
        value = pair_element(da, Element.of(b)) + pair_element(Element.of(a), db, (-1) ** a.degree)
        if value:
            differential[g] = value
    for (a, b), g in pairs.items():
        for (a2, b2), g2 in pairs.items():
            ab = classical_product(A, a, a2)
            bb = classical_product(B, b, b2)
            if ab and bb:
                product[(g, g2)] = pair_element(ab, bb, (-1) ** (b.degree * a2.degree))
    units = [pairs[(e, f)] for e in A.units for f in B.units]
    return from_dga(basis, product, differential, units, name=f"{A.name}|{B.name}")


def tensor_swap(A: CurvedAInfAlgebra, B: CurvedAInfAlgebra) -> Dict[Generator, Element]:
    """Koszul-signed swap a|b -> (-1)^(|a||b|) b|a from tensor_dg(A, B) to tensor_dg(B, A)."""
    _require_dg(A)
    _require_dg(B)
    backward = _tensor_generators(B, A)
    return {g: Element.of(backward[(b, a)], (-1) ** (a.degree * b.degree))
            for (a, b), g in _tensor_generators(A, B).items()}


def is_dga_isomorphism(A: CurvedAInfAlgebra, B: CurvedAInfAlgebra, phi: Mapping[Generator, Element]) -> bool:
    """
    Check that a linear bijection on generators commutes with m1 and m2.

    Args:
        A: Source dga
        B: Target dga
        phi: Generator of A -> element of B
    """
    def image(x: Element) -> Element:
        return Element.sum(phi[g] * c for g, c in x)

    if len(A.basis) != len(B.basis):
        return False
    for a in A.basis:
        if image(evaluate(A.op(1), (Element.of(a),))) != evaluate(B.op(1), (phi[a],)):
            return False
        for a2 in A.basis:
            left = image(evaluate(A.op(2), (Element.of(a), Element.of(a2))))
            if left != evaluate(B.op(2), (phi[a], phi[a2])):
                return False
    return True
