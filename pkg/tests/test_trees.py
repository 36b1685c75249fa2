import itertools
from fractions import Fraction

import pytest

from ainfty_engine.backend.errors import BadConnection, ColorMismatch, MalformedTree
from ainfty_engine.backend.trees import (ASSOCIAHEDRON, MULTIPLIHEDRON, BrokenTree, ColoredRootedTree,
                                         Connection, Edge, Leaf, Node, StratumDescriptor, all_strata,
                                         boundary_map, break_edge, check_broken_tree, encode,
                                         enumerate_colored_trees, enumerate_strata, glue, interior_edges,
                                         is_admissible, parse_shape, unstable_vertices)


def test_encoding_round_trip():
    for text in ["(1,(2,3),4)", "N(1)", "P(N(1),N((2,3)))", "N((1,2),3)"]:
        assert encode(parse_shape(text)) == text


@pytest.mark.parametrize("text", ["(1,2", "(2,1)", "P(1,2)", "(1)", "(1,N(2))", "(1,2))", "x"])
def test_malformed_encodings(text):
    with pytest.raises(MalformedTree):
        parse_shape(text)


@pytest.mark.parametrize("k,count", [(4, 5), (5, 14), (6, 42)])
def test_associahedron_vertices_are_catalan(k, count):
    assert len(enumerate_strata(ASSOCIAHEDRON, k, k - 2)) == count


@pytest.mark.parametrize("k,count", [(4, 5), (5, 9)])
def test_associahedron_facets(k, count):
    assert len(enumerate_strata(ASSOCIAHEDRON, k, 1)) == count


@pytest.mark.parametrize("k,count", [(1, 1), (2, 2), (3, 6), (4, 21)])
def test_multiplihedron_vertices(k, count):
    assert len(enumerate_strata(MULTIPLIHEDRON, k, k - 1)) == count


@pytest.mark.parametrize("k,count", [(2, 2), (3, 6), (4, 13)])
def test_multiplihedron_facets(k, count):
    assert len(enumerate_strata(MULTIPLIHEDRON, k, 1)) == count


def test_stratum_lines_and_weights():
    top = enumerate_strata(MULTIPLIHEDRON, 3, 0)
    assert [s.encoding for s in top] == ["N(1,2,3)"]
    assert top[0].w == "finite"

    painted = StratumDescriptor.of(MULTIPLIHEDRON, parse_shape("P(N(1),N(2))"))
    assert painted.line() == "moduli=N k=2 codim=1 w=inf tree=P(N(1),N(2))"
    assert StratumDescriptor.of(MULTIPLIHEDRON, parse_shape("N((1,2))")).w == "0"
    assert StratumDescriptor.of(ASSOCIAHEDRON, parse_shape("((1,2),3)")).line() == \
        "moduli=M k=3 codim=1 tree=((1,2),3)"

    # Root kind must match the moduli space
    with pytest.raises(MalformedTree):
        StratumDescriptor.of(ASSOCIAHEDRON, parse_shape("N((1,2))"))
    with pytest.raises(MalformedTree):
        StratumDescriptor.of(MULTIPLIHEDRON, parse_shape("((1,2),3)"))


def test_enumeration_is_sorted_and_duplicate_free():
    strata = enumerate_strata(ASSOCIAHEDRON, 5, 1)
    encodings = [s.encoding for s in strata]
    assert encodings == sorted(encodings)
    assert len(set(encodings)) == len(encodings)


@pytest.mark.parametrize("moduli,k", [(ASSOCIAHEDRON, 4), (ASSOCIAHEDRON, 5), (MULTIPLIHEDRON, 3),
                                      (MULTIPLIHEDRON, 4)])
def test_boundary_reaches_every_stratum(moduli, k):
    # Closure of the top stratum under the boundary map
    top = enumerate_strata(moduli, k, 0)
    reached = set(top)
    frontier = list(top)
    while frontier:
        stratum = frontier.pop()
        for face in boundary_map(stratum):
            assert face.codim == stratum.codim + 1
            if face not in reached:
                reached.add(face)
                frontier.append(face)
    assert reached == set(all_strata(moduli, k))


@pytest.mark.parametrize("moduli,k", [(ASSOCIAHEDRON, 5), (MULTIPLIHEDRON, 3), (MULTIPLIHEDRON, 4)])
def test_diamond_property(moduli, k):
    strata = all_strata(moduli, k)
    faces = {s: set(boundary_map(s)) for s in strata}
    for upper in strata:
        below = {g for f in faces[upper] for g in faces[f]}
        for lower in below:
            between = [f for f in faces[upper] if lower in faces[f]]
            assert len(between) == 2, (upper.encoding, lower.encoding)


def corolla(root_color, vertex_color, leaf_colors):
    return ColoredRootedTree(root_color, Node(vertex_color, tuple(Leaf(c) for c in leaf_colors)))


def test_admissibility():
    # Exceptional lines
    assert is_admissible(ColoredRootedTree(0))
    assert not is_admissible(ColoredRootedTree(1))

    assert is_admissible(corolla(1, 1, [0, 0]))
    assert is_admissible(corolla(0, 0, [0, 0]))
    assert not is_admissible(corolla(1, 0, [0]))
    assert not is_admissible(corolla(0, 0, [1]))

    below_unpainted = Node(0, (Leaf(0),))
    assert is_admissible(ColoredRootedTree(1, Node(1, (Edge(Fraction(1), below_unpainted, 0),))))
    assert not is_admissible(ColoredRootedTree(1, Node(1, (Edge(Fraction(1), below_unpainted, 1),))))
    assert not is_admissible(ColoredRootedTree(0, Node(0, (Edge(Fraction(1), Node(1, (Leaf(0),)), 0),))))

    with pytest.raises(MalformedTree):
        is_admissible(corolla(0, 2, [0]))


def painted_stratum():
    return StratumDescriptor.of(MULTIPLIHEDRON, parse_shape("P(N(1),N(2))")).broken_tree()


def test_stratum_broken_tree():
    broken = painted_stratum()
    check_broken_tree(broken)
    assert len(broken.components) == 3
    assert broken.connection(2) == Connection(2, 0, 1)
    assert all(is_admissible(c) for c in broken.components)
    assert unstable_vertices(broken.components[1]) == [()]


def test_glue_and_break_are_inverse():
    tree = glue(painted_stratum(), {1: Fraction(1), 2: Fraction(5, 2)})
    assert isinstance(tree, ColoredRootedTree)
    assert is_admissible(tree)
    assert interior_edges(tree) == [(0,), (1,)]
    assert tree.vertex_count() == 3

    broken, length = break_edge(tree, (1,))
    assert length == Fraction(5, 2)
    assert glue(broken, {1: length}) == tree


def test_partial_gluing_keeps_origin():
    broken = painted_stratum()
    partial = glue(broken, {2: Fraction(2)}, subset=[2])
    assert isinstance(partial, BrokenTree)
    assert partial.origin == (0, 1)
    assert partial.connections == (Connection(1, 0, 0),)

    # Gluing in two steps matches gluing at once
    assert glue(partial, {1: Fraction(1)}) == glue(broken, {1: Fraction(1), 2: Fraction(2)})


def test_broken_tree_errors():
    painted = corolla(1, 1, [1, 1])
    unpainted = corolla(0, 0, [0, 0])
    with pytest.raises(ColorMismatch):
        check_broken_tree(BrokenTree((painted, unpainted), (Connection(1, 0, 0),)))
    with pytest.raises(BadConnection):
        check_broken_tree(BrokenTree((painted, painted), (Connection(1, 0, 5),)))
    with pytest.raises(BadConnection):
        check_broken_tree(BrokenTree((painted, painted)))
    with pytest.raises(BadConnection):
        glue(painted_stratum(), {1: Fraction(1), 2: Fraction(0)})
    with pytest.raises(BadConnection):
        break_edge(painted, (0,))


def test_enumerated_trees_split_and_reglue():
    trees = enumerate_colored_trees()
    assert trees[:2] == [ColoredRootedTree(0), ColoredRootedTree(1)]
    admissible = [t for t in trees if is_admissible(t)]
    assert 0 < len(admissible) < len(trees)
    for tree in admissible:
        for path in interior_edges(tree):
            broken, length = break_edge(tree, path)
            check_broken_tree(broken)
            assert glue(broken, {1: length}) == tree


def naive_shapes(lo, hi, painted):
    """
    Stratum trees on leaves lo..hi built from contiguous splits.

    Below the transition (``painted``) a vertex is P or N; above it a vertex is
    M or a single leaf. M and P need two blocks, N needs one.
    """
    def splits(minimum):
        inner = range(lo + 1, hi + 1)
        for r in range(minimum - 1, hi - lo + 1):
            for cuts in itertools.combinations(inner, r):
                bounds = (lo,) + cuts + (hi + 1,)
                yield [(bounds[i], bounds[i + 1] - 1) for i in range(len(bounds) - 1)]

    def children(blocks, below):
        return itertools.product(*(naive_shapes(a, b, below) for a, b in blocks))

    if not painted:
        if lo == hi:
            yield lo
        for blocks in splits(2):
            for kids in children(blocks, False):
                yield ("M", kids)
        return
    for blocks in splits(1):
        for kids in children(blocks, False):
            yield ("N", kids)
    for blocks in splits(2):
        for kids in children(blocks, True):
            yield ("P", kids)


def naive_encode(shape):
    if isinstance(shape, int):
        return str(shape)
    kind, kids = shape
    body = ",".join(naive_encode(c) for c in kids)
    return f"({body})" if kind == "M" else f"{kind}({body})"


def naive_dimension(shape):
    if isinstance(shape, int):
        return 0
    kind, kids = shape
    own = len(kids) - 1 if kind == "N" else len(kids) - 2
    return own + sum(naive_dimension(c) for c in kids)


@pytest.mark.parametrize("moduli,k", [(MULTIPLIHEDRON, k) for k in range(1, 5)] +
                         [(ASSOCIAHEDRON, k) for k in range(2, 6)])
def test_strata_match_naive_enumeration(moduli, k):
    painted = moduli == MULTIPLIHEDRON
    top = k - 1 if painted else k - 2
    expected = {(naive_encode(s), top - naive_dimension(s)) for s in naive_shapes(1, k, painted)
                if not isinstance(s, int)}
    found = all_strata(moduli, k)
    assert {(s.encoding, s.codim) for s in found} == expected
    assert len(found) == len(expected)

    # Codimension slices agree too
    for codim in range(top + 1):
        assert len(enumerate_strata(moduli, k, codim)) == sum(1 for _, c in expected if c == codim)


def edge_colors(tree):
    """(edge color, parent vertex color, child vertex color) for every edge; None marks an open end."""
    edges = [(tree.root_color, None, tree.top.color)]
    stack = [tree.top]
    while stack:
        node = stack.pop()
        for child in node.children:
            if isinstance(child, Leaf):
                edges.append((child.color, node.color, None))
            else:
                edges.append((child.color, node.color, child.node.color))
                stack.append(child.node)
    return edges


def admissible_by_edges(tree):
    if tree.top is None:
        return tree.root_color == 0
    edges = edge_colors(tree)
    painted_ends = all(end == 1 for color, parent, child in edges if color == 1
                       for end in (parent, child) if end is not None)
    painted_core = all(parent == 1 for _, parent, child in edges if parent is not None and child == 1)
    return painted_ends and painted_core


def test_admissibility_matches_edge_rule():
    trees = enumerate_colored_trees() + enumerate_colored_trees(3, 1)
    for tree in trees:
        assert is_admissible(tree) == admissible_by_edges(tree), tree


def admissible_corollas(max_leaves):
    found = []
    for n in range(1, max_leaves + 1):
        for root_color, vertex_color in itertools.product((0, 1), repeat=2):
            for colors in itertools.product((0, 1), repeat=n):
                tree = corolla(root_color, vertex_color, colors)
                if admissible_by_edges(tree):
                    found.append(tree)
    return found


def colors_agree(broken):
    return all(broken.components[c.parent].leaves()[c.leaf].color == broken.components[c.child].root_color
               for c in broken.connections)


def small_broken_trees():
    small = admissible_corollas(2)
    for bottom in admissible_corollas(3):
        for top in small:
            for leaf in range(len(bottom.leaves())):
                broken = BrokenTree((bottom, top), (Connection(1, 0, leaf),))
                if colors_agree(broken):
                    yield broken
    for bottom, middle, top in itertools.product(small, small, small):
        for first in range(len(bottom.leaves())):
            for parent, host in ((0, bottom), (1, middle)):
                for leaf in range(len(host.leaves())):
                    if (parent, leaf) == (0, first):
                        continue
                    broken = BrokenTree((bottom, middle, top), (Connection(1, 0, first), Connection(2, parent, leaf)))
                    if colors_agree(broken):
                        yield broken
    for stratum in all_strata(MULTIPLIHEDRON, 3) + all_strata(MULTIPLIHEDRON, 4):
        yield stratum.broken_tree()


def test_gluing_in_any_order_agrees():
    count = 0
    for broken in small_broken_trees():
        children = [c.child for c in broken.connections]
        params = {j: Fraction(2 * j + 1, 3) for j in children}
        full = glue(broken, params)
        for r in range(1, len(children)):
            for first in itertools.combinations(children, r):
                partial = glue(broken, {j: params[j] for j in first}, subset=first)
                rest = {c.child: params[partial.origin[c.child]] for c in partial.connections}
                assert glue(partial, rest) == full
        count += 1
    assert count > 1000


def test_gluing_preserves_admissibility():
    for broken in small_broken_trees():
        components = broken.components
        children = [c.child for c in broken.connections]
        params = {j: Fraction(1) for j in children}

        # A new interior edge only needs a painted child to hang off a painted vertex
        expected = all(components[c.child].top.color == 0 or components[c.parent].top.color == 1
                       for c in broken.connections)
        assert is_admissible(glue(broken, params)) == expected
        if not expected:
            continue
        for r in range(1, len(children)):
            for first in itertools.combinations(children, r):
                partial = glue(broken, params, subset=first)
                assert all(is_admissible(t) for t in partial.components)
