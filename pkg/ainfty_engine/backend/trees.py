"""
Colored rooted trees and the strata of associahedra and multiplihedra.

Stratum trees are written in planar leaf order: an unpainted vertex is
``(c1,c2,...)``, a transition vertex is ``N(...)`` and a painted vertex is
``P(...)``; leaves are labelled 1..k. Colored rooted trees carry vertex
colors, exterior/interior edge colors and exact rational edge lengths, and
support gluing at infinity and its inverse.
"""

import logging
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from jaraco.functools import apply
from more_itertools import partitions

from .errors import BadConnection, ColorMismatch, MalformedTree

logger = logging.getLogger("Trees")

ASSOCIAHEDRON = "M"
MULTIPLIHEDRON = "N"

# Stratum trees: a leaf is an int, a vertex is (kind, children) with kind in "MNP".
Shape = Union[int, Tuple[str, tuple]]


def encode(shape: Shape) -> str:
    if isinstance(shape, int):
        return str(shape)
    kind, children = shape
    body = ",".join(encode(c) for c in children)
    return f"({body})" if kind == "M" else f"{kind}({body})"


_TOKEN = re.compile(r"\s*(N\(|P\(|\(|\)|,|\d+)")


def parse_shape(text: str) -> Shape:
    """
    Parse a canonical stratum encoding.

    Raises:
        MalformedTree: the text is not a well-formed stratum tree
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise MalformedTree(f"unexpected character at {pos} in {text!r}")
        tokens.append(match.group(1))
        pos = match.end()

    def node(i: int) -> Tuple[Shape, int]:
        if i >= len(tokens):
            raise MalformedTree(f"unexpected end of {text!r}")
        token = tokens[i]
        if token.isdigit():
            return int(token), i + 1
        if token not in ("(", "N(", "P("):
            raise MalformedTree(f"unexpected {token!r} in {text!r}")
        kind = "M" if token == "(" else token[0]
        children = []
        i += 1
        while True:
            child, i = node(i)
            children.append(child)
            if i < len(tokens) and tokens[i] == ",":
                i += 1
                continue
            if i < len(tokens) and tokens[i] == ")":
                return (kind, tuple(children)), i + 1
            raise MalformedTree(f"unbalanced parentheses in {text!r}")

    shape, end = node(0)
    if end != len(tokens):
        raise MalformedTree(f"trailing input in {text!r}")
    _validate(shape)
    return shape


def _validate(shape: Shape, under: Optional[str] = None):
    if isinstance(shape, int):
        if under in ("P", None):
            raise MalformedTree(f"leaf {shape} must sit below an unpainted or transition vertex")
        return
    kind, children = shape
    if kind in ("M", "P") and len(children) < 2:
        raise MalformedTree(f"{kind} vertex needs at least two children")
    if kind == "N" and not children:
        raise MalformedTree("N vertex needs at least one child")
    if under in ("M", "N") and kind != "M":
        raise MalformedTree(f"{kind} vertex cannot sit above an unpainted vertex")
    if under == "P" and kind == "M":
        raise MalformedTree("unpainted vertex cannot sit directly below a painted one")
    for child in children:
        _validate(child, kind)
    if under is None:
        labels = leaves_of(shape)
        if labels != list(range(1, len(labels) + 1)):
            raise MalformedTree(f"leaves {labels} are not 1..k in planar order")


def leaves_of(shape: Shape) -> List[int]:
    if isinstance(shape, int):
        return [shape]
    return [leaf for child in shape[1] for leaf in leaves_of(child)]


def _vertices(shape: Shape) -> Iterable[Tuple[str, int]]:
    if isinstance(shape, int):
        return
    kind, children = shape
    yield kind, len(children)
    for child in children:
        yield from _vertices(child)


def dimension(shape: Shape) -> int:
    """Sum of vertex dimensions: N-vertices with p children count p - 1, others p - 2."""
    return sum(p - 1 if kind == "N" else p - 2 for kind, p in _vertices(shape))


def moduli_dimension(moduli: str, k: int) -> int:
    return k - 2 if moduli == ASSOCIAHEDRON else k - 1


@dataclass(frozen=True, order=True)
class StratumDescriptor:
    """
    Combinatorial type of a stratum of the associahedron (M) or multiplihedron (N).

    ``w`` is the weight symbol of a multiplihedron stratum: ``0``, ``finite``
    or ``inf``; it is empty for associahedron strata.
    """
    moduli: str
    leaves: int
    encoding: str
    codim: int
    w: str = ""

    @property
    def shape(self) -> Shape:
        return parse_shape(self.encoding)

    @classmethod
    def of(cls, moduli: str, shape: Shape) -> "StratumDescriptor":
        """
        Raises:
            MalformedTree: the root kind does not belong to the moduli space
        """
        root = shape[0] if isinstance(shape, tuple) else None
        if (moduli == ASSOCIAHEDRON) != (root == "M"):
            raise MalformedTree(f"{encode(shape)} is not a stratum tree of {moduli}")
        k = len(leaves_of(shape))
        return cls(moduli, k, encode(shape), moduli_dimension(moduli, k) - dimension(shape),
                   weight_symbol(shape) if moduli == MULTIPLIHEDRON else "")

    def line(self) -> str:
        extra = f" w={self.w}" if self.w else ""
        return f"moduli={self.moduli} k={self.leaves} codim={self.codim}{extra} tree={self.encoding}"

    def broken_tree(self) -> "BrokenTree":
        """
        One corolla per vertex, connected as in the stratum tree.

        Unpainted vertices have color 0 and color-0 edges; transition vertices
        have color 1 with a color-1 root edge and color-0 leaves; painted
        vertices have color 1 and color-1 edges.
        """
        components = []
        connections = []

        def visit(shape, parent: Optional[int], slot: int):
            kind, children = shape
            index = len(components)
            components.append(None)
            if parent is not None:
                connections.append(Connection(index, parent, slot))
            leaf_color = 1 if kind == "P" else 0
            root_color = 0 if kind == "M" else 1
            vertex_color = 0 if kind == "M" else 1
            components[index] = ColoredRootedTree(
                root_color, Node(vertex_color, tuple(Leaf(leaf_color) for _ in children)))
            for position, child in enumerate(children):
                if not isinstance(child, int):
                    visit(child, index, position)

        visit(self.shape, None, 0)
        return BrokenTree(tuple(components), tuple(connections))


def weight_symbol(shape: Shape) -> str:
    kind, children = shape
    if kind == "P":
        return "inf"
    if kind == "N" and len(children) == 1 and not isinstance(children[0], int):
        return "0"
    return "finite"


def _blocks(lo: int, hi: int, minimum: int) -> List[List[Tuple[int, int]]]:
    """Contiguous splittings of lo..hi into at least ``minimum`` blocks, as (start, end) pairs."""
    result = []
    for parts in partitions(range(lo, hi + 1)):
        if len(parts) >= minimum:
            result.append([(p[0], p[-1]) for p in parts])
    return result


@lru_cache(maxsize=None)
def _mtrees(lo: int, hi: int) -> Tuple[Shape, ...]:
    if lo == hi:
        return (lo,)
    found = []
    for blocks in _blocks(lo, hi, 2):
        for children in _product([_mtrees(a, b) for a, b in blocks]):
            found.append(("M", children))
    return tuple(found)


@lru_cache(maxsize=None)
def _ptrees(lo: int, hi: int) -> Tuple[Shape, ...]:
    found = []
    for blocks in _blocks(lo, hi, 1):
        for children in _product([_mtrees(a, b) for a, b in blocks]):
            found.append(("N", children))
    for blocks in _blocks(lo, hi, 2):
        for children in _product([_ptrees(a, b) for a, b in blocks]):
            found.append(("P", children))
    return tuple(found)


@apply(list)
def _product(pools: Sequence[Sequence[Shape]]):
    if not pools:
        yield ()
        return
    for head in pools[0]:
        for rest in _product(pools[1:]):
            yield (head,) + rest


def all_strata(moduli: str, k: int) -> List[StratumDescriptor]:
    if moduli == ASSOCIAHEDRON:
        shapes = _mtrees(1, k) if k >= 2 else ()
    elif moduli == MULTIPLIHEDRON:
        shapes = _ptrees(1, k) if k >= 1 else ()
    else:
        raise ValueError(f"unknown moduli {moduli}")
    return sorted(StratumDescriptor.of(moduli, s) for s in shapes)


def enumerate_strata(moduli: str, k: int, codim: int) -> List[StratumDescriptor]:
    """
    Strata of M_{k+1} or N_{k+1} at a codimension, in canonical order.

    Args:
        moduli: "M" for the associahedron, "N" for the multiplihedron
        k: Number of leaves (k >= 2 for M, k >= 1 for N)
        codim: Codimension

    Returns:
        Duplicate-free list sorted by encoding
    """
    found = [s for s in all_strata(moduli, k) if s.codim == codim]
    logger.debug(f"{moduli}_{k + 1}: {len(found)} strata of codimension {codim}")
    return found


def _refinements(shape: Shape) -> List[Shape]:
    if isinstance(shape, int):
        return []
    kind, children = shape
    found = []
    p = len(children)
    if kind in ("M", "P"):
        for start in range(p):
            for end in range(start + 2, min(p, start + p - 1) + 1):
                if end - start >= p:
                    continue
                grouped = children[:start] + ((kind, children[start:end]),) + children[end:]
                found.append((kind, grouped))
    else:
        for start in range(p):
            for end in range(start + 2, p + 1):
                grouped = children[:start] + (("M", children[start:end]),) + children[end:]
                found.append(("N", grouped))
        for parts in partitions(children):
            if len(parts) >= 2:
                found.append(("P", tuple(("N", tuple(part)) for part in parts)))
    for i, child in enumerate(children):
        for refined in _refinements(child):
            found.append((kind, children[:i] + (refined,) + children[i + 1:]))
    return found


def boundary_map(stratum: StratumDescriptor) -> List[StratumDescriptor]:
    """Strata of one higher codimension in the closure of the given stratum."""
    faces = {encode(s) for s in _refinements(stratum.shape)}
    return sorted(StratumDescriptor.of(stratum.moduli, parse_shape(e)) for e in faces)


# Colored rooted trees


@dataclass(frozen=True)
class Leaf:
    """Exterior leaf edge; ``mark`` is only used while gluing."""
    color: int
    mark: Optional[Tuple[int, int]] = None


@dataclass(frozen=True)
class Node:
    color: int
    children: Tuple[Union[Leaf, "Edge"], ...] = ()


@dataclass(frozen=True)
class Edge:
    """Interior edge to a child vertex; the color is the exterior color it was glued from."""
    length: Fraction
    node: Node
    color: int


@dataclass(frozen=True)
class ColoredRootedTree:
    """
    Planar rooted tree with a root edge color and a top vertex.

    ``top`` is None for the exceptional tree made of one doubly infinite edge.
    """
    root_color: int
    top: Optional[Node] = None

    def leaves(self) -> List[Leaf]:
        if self.top is None:
            return [Leaf(self.root_color)]
        return _leaves(self.top)

    def vertex_count(self) -> int:
        return 0 if self.top is None else sum(1 for _ in _walk(self.top, ()))


def _leaves(node: Node) -> List[Leaf]:
    found = []
    for child in node.children:
        if isinstance(child, Leaf):
            found.append(child)
        else:
            found.extend(_leaves(child.node))
    return found


def _walk(node: Node, path: Tuple[int, ...]):
    yield path, node
    for i, child in enumerate(node.children):
        if isinstance(child, Edge):
            yield from _walk(child.node, path + (i,))


def _check_colors(node: Node):
    if node.color not in (0, 1):
        raise MalformedTree(f"vertex color {node.color}")
    for child in node.children:
        if isinstance(child, Leaf):
            if child.color not in (0, 1):
                raise MalformedTree(f"leaf color {child.color}")
        elif isinstance(child, Edge):
            if child.color not in (0, 1):
                raise MalformedTree(f"edge color {child.color}")
            if child.length is None or Fraction(child.length) < 0:
                raise MalformedTree(f"interior edge length {child.length}")
            _check_colors(child.node)
        else:
            raise MalformedTree(f"unexpected child {child!r}")


def is_admissible(tree: ColoredRootedTree) -> bool:
    """
    Coloring constraint plus a color-1 core containing the top vertex.

    Every color-1 edge ends at color-1 vertices, and color-0 vertices only
    hang off the core through color-0 edges.

    Raises:
        MalformedTree: colors outside {0, 1} or invalid edge lengths
    """
    if tree.root_color not in (0, 1):
        raise MalformedTree(f"root color {tree.root_color}")
    if tree.top is None:
        return tree.root_color == 0
    _check_colors(tree.top)
    if tree.root_color == 1 and tree.top.color != 1:
        return False
    return _admissible_below(tree.top)


def _admissible_below(node: Node) -> bool:
    for child in node.children:
        if isinstance(child, Leaf):
            if child.color == 1 and node.color != 1:
                return False
            continue
        below = child.node
        if below.color == 1 and node.color != 1:
            return False
        if child.color == 1 and (node.color != 1 or below.color != 1):
            return False
        if not _admissible_below(below):
            return False
    return True


def unstable_vertices(tree: ColoredRootedTree) -> List[Tuple[int, ...]]:
    """Paths of color-1 vertices with valence at most two."""
    if tree.top is None:
        return []
    return [path for path, node in _walk(tree.top, ()) if node.color == 1 and len(node.children) + 1 <= 2]


@dataclass(frozen=True)
class Connection:
    """The root of component ``child`` is attached at infinity to leaf ``leaf`` of component ``parent``."""
    child: int
    parent: int
    leaf: int


@dataclass(frozen=True)
class BrokenTree:
    components: Tuple[ColoredRootedTree, ...]
    connections: Tuple[Connection, ...] = ()
    origin: Tuple[int, ...] = field(default=(), compare=False)

    def connection(self, child: int) -> Connection:
        for c in self.connections:
            if c.child == child:
                return c
        raise BadConnection(f"component {child} has no connection")


def check_broken_tree(broken: BrokenTree):
    """
    Raises:
        BadConnection: a component is unattached, attached twice, attached to a
            later component or to a missing or already used leaf
        ColorMismatch: root and leaf colors differ at a connection
    """
    n = len(broken.components)
    seen = set()
    used = set()
    for c in broken.connections:
        if not 0 < c.child < n or c.child in seen:
            raise BadConnection(f"component {c.child} is connected twice or does not exist")
        if not 0 <= c.parent < c.child:
            raise BadConnection(f"component {c.child} must attach to an earlier component, got {c.parent}")
        leaves = broken.components[c.parent].leaves()
        if not 0 <= c.leaf < len(leaves) or (c.parent, c.leaf) in used:
            raise BadConnection(f"leaf {c.leaf} of component {c.parent} is missing or used")
        if broken.components[c.child].top is None:
            raise BadConnection(f"component {c.child} is the exceptional line")
        if leaves[c.leaf].color != broken.components[c.child].root_color:
            raise ColorMismatch(f"component {c.child} has root color {broken.components[c.child].root_color} "
                                f"but leaf {c.leaf} of {c.parent} has color {leaves[c.leaf].color}")
        seen.add(c.child)
        used.add((c.parent, c.leaf))
    if len(seen) != n - 1:
        raise BadConnection("every component except the first needs exactly one connection")


def _mark(node: Node, component: int, counter: List[int]) -> Node:
    children = []
    for child in node.children:
        if isinstance(child, Leaf):
            children.append(Leaf(child.color, (component, counter[0])))
            counter[0] += 1
        else:
            children.append(replace(child, node=_mark(child.node, component, counter)))
    return Node(node.color, tuple(children))


def _unmark(node: Node) -> Node:
    children = []
    for child in node.children:
        if isinstance(child, Leaf):
            children.append(Leaf(child.color))
        else:
            children.append(replace(child, node=_unmark(child.node)))
    return Node(node.color, tuple(children))


def _substitute(node: Node, mark: Tuple[int, int], edge: Edge) -> Tuple[Node, bool]:
    children = []
    found = False
    for child in node.children:
        if not found and isinstance(child, Leaf) and child.mark == mark:
            children.append(edge)
            found = True
        elif not found and isinstance(child, Edge):
            below, found = _substitute(child.node, mark, edge)
            children.append(replace(child, node=below))
        else:
            children.append(child)
    return Node(node.color, tuple(children)), found


def glue(broken: BrokenTree, params: Mapping[int, Fraction],
         subset: Optional[Iterable[int]] = None) -> Union[ColoredRootedTree, BrokenTree]:
    """
    Glue components at the chosen connections.

    Args:
        broken: Broken tree
        params: Component index j -> gluing length rho_j > 0
        subset: Components to glue; all connections when None

    Returns:
        A single tree when every connection is glued, otherwise the broken
        tree of the remaining components (``origin`` keeps their old indices)

    Raises:
        BadConnection: malformed connections or a non-positive parameter
        ColorMismatch: colors differ at a connection
    """
    check_broken_tree(broken)
    chosen = {c.child for c in broken.connections} if subset is None else set(subset)
    for j in chosen:
        if j not in params or Fraction(params[j]) <= 0:
            raise BadConnection(f"gluing parameter for component {j} must be positive")
    origin = broken.origin or tuple(range(len(broken.components)))
    trees = {i: ColoredRootedTree(t.root_color, _mark(t.top, i, [0]) if t.top is not None else None)
             for i, t in enumerate(broken.components)}
    owner = {i: i for i in trees}

    def find(i: int) -> int:
        while owner[i] != i:
            i = owner[i]
        return i

    for c in sorted(broken.connections, key=lambda c: c.child):
        if c.child not in chosen:
            continue
        host = find(c.parent)
        child = trees[c.child]
        edge = Edge(Fraction(params[c.child]), child.top, child.root_color)
        top, found = _substitute(trees[host].top, (c.parent, c.leaf), edge)
        if not found:
            raise BadConnection(f"leaf {c.leaf} of component {c.parent} not found")
        trees[host] = ColoredRootedTree(trees[host].root_color, top)
        owner[c.child] = host
    remaining = sorted(i for i in trees if find(i) == i)
    if len(remaining) == 1:
        tree = trees[remaining[0]]
        return ColoredRootedTree(tree.root_color, _unmark(tree.top) if tree.top is not None else None)
    position = {i: n for n, i in enumerate(remaining)}
    connections = []
    for c in broken.connections:
        if c.child in chosen:
            continue
        host = find(c.parent)
        leaves = trees[host].leaves()
        index = next(n for n, leaf in enumerate(leaves) if leaf.mark == (c.parent, c.leaf))
        connections.append(Connection(position[c.child], position[host], index))
    components = tuple(ColoredRootedTree(trees[i].root_color,
                                         _unmark(trees[i].top) if trees[i].top is not None else None)
                       for i in remaining)
    return BrokenTree(components, tuple(sorted(connections, key=lambda c: c.child)),
                      tuple(origin[i] for i in remaining))


def break_edge(tree: ColoredRootedTree, path: Sequence[int]) -> Tuple[BrokenTree, Fraction]:
    """
    Break the interior edge reached by following child indices from the top.

    Returns:
        (two-component broken tree, length of the broken edge)

    Raises:
        BadConnection: the path does not end at an interior edge
    """
    if tree.top is None or not path:
        raise BadConnection("path must name an interior edge")
    marker = (-1, -1)

    def cut(node: Node, rest: Sequence[int]) -> Tuple[Node, Edge]:
        i = rest[0]
        if not 0 <= i < len(node.children) or not isinstance(node.children[i], Edge):
            raise BadConnection(f"no interior edge at child {i}")
        edge = node.children[i]
        if len(rest) == 1:
            children = node.children[:i] + (Leaf(edge.color, marker),) + node.children[i + 1:]
            return Node(node.color, children), edge
        below, found = cut(edge.node, rest[1:])
        children = node.children[:i] + (replace(edge, node=below),) + node.children[i + 1:]
        return Node(node.color, children), found

    top, edge = cut(tree.top, list(path))
    leaf = next(n for n, l in enumerate(_leaves(top)) if l.mark == marker)
    lower = ColoredRootedTree(tree.root_color, _unmark(top))
    upper = ColoredRootedTree(edge.color, edge.node)
    return BrokenTree((lower, upper), (Connection(1, 0, leaf),)), edge.length


def interior_edges(tree: ColoredRootedTree) -> List[Tuple[int, ...]]:
    """Paths to every interior edge."""
    if tree.top is None:
        return []
    found = []
    for path, node in _walk(tree.top, ()):
        for i, child in enumerate(node.children):
            if isinstance(child, Edge):
                found.append(path + (i,))
    return found


@apply(list)
def enumerate_colored_trees(max_vertices: int = 2, max_leaves: int = 2):
    """
    Every colored tree with at most ``max_vertices`` vertices in a chain shape,
    each vertex carrying at most ``max_leaves`` leaves, unit interior lengths.
    """
    yield ColoredRootedTree(0)
    yield ColoredRootedTree(1)
    for tree in _chains(max_vertices, max_leaves):
        for root_color in (0, 1):
            yield ColoredRootedTree(root_color, tree)


def _chains(depth: int, max_leaves: int) -> List[Node]:
    if depth == 0:
        return []
    found = []
    for color in (0, 1):
        for count in range(max_leaves + 1):
            for leaf_colors in _product([(Leaf(0), Leaf(1))] * count):
                found.append(Node(color, tuple(leaf_colors)))
                for below in _chains(depth - 1, max_leaves):
                    for edge_color in (0, 1):
                        for slot in range(count + 1):
                            children = tuple(leaf_colors[:slot]) + (Edge(Fraction(1), below, edge_color),) + \
                                tuple(leaf_colors[slot:])
                            found.append(Node(color, children))
    return found
