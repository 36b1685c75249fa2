import random
from fractions import Fraction

import pytest

from ainfty_engine.backend.core import Basis, Generator
from ainfty_engine.backend.errors import NotFiltrationPreserving, NotIsomorphism, SystemNotCommuting
from ainfty_engine.backend.homology import ChainMap, FiniteComplex, identity, rows_of
from ainfty_engine.backend.limits import (DirectedSystem, compute_corrector, direct_limit, filtration_system,
                                          stagewise_quasi_isomorphisms, truncation, verify_system)


def filtered_complex():
    """a -> b and c -> d, with z a cycle at level 1."""
    a, b, c, z, d = (Generator("a", 0, 0), Generator("b", 1, 0), Generator("c", 1, 1),
                     Generator("z", 1, 1), Generator("d", 2, 2))
    return FiniteComplex({0: Basis([a]), 1: Basis([b, c, z]), 2: Basis([d])},
                         {0: [[1], [0], [0]], 1: [[0, 1, 0]]}, "T")


def plane():
    return FiniteComplex({0: Basis([Generator("p", 0), Generator("q", 0)])}, {}, "Z2")


def constant_system(comparisons):
    C = plane()
    n = len(comparisons)
    ident = ChainMap.identity(C)
    maps = tuple(ChainMap(C, C, {0: m}) for m in comparisons)
    return DirectedSystem((C,) * n, (ident,) * (n - 1), (C,) * n, (ident,) * (n - 1), maps)


def test_filtered_truncations_recover_the_complex():
    system = filtration_system(filtered_complex())
    assert [s.degrees() for s in system.stages] == [[2], [1, 2], [0, 1, 2]]
    assert verify_system(system) == []

    result = direct_limit(system)
    assert result.line() == "LIMIT stages=3 stable_from=2 dims=[0:1,1:3,2:1]"
    assert [g.name for g in result.complex.generators] == ["a", "b", "c", "z", "d"]
    for d in range(len(system)):
        assert result.restriction_defects(d) == {}
    assert stagewise_quasi_isomorphisms(system) == [True, True, True]


def test_single_stage_limit_is_identity():
    system = filtration_system(filtered_complex(), levels=[Fraction(0)])
    result = direct_limit(system)
    assert result.stable_from == 0
    for s in result.complex.degrees():
        assert rows_of(result.limit_map.component(s)) == rows_of(identity(result.complex.dimension(s)))


def test_truncation_must_be_a_subcomplex():
    low, high = Generator("low", 1, 0), Generator("high", 0, 1)
    complex_ = FiniteComplex({0: Basis([high]), 1: Basis([low])}, {0: [[1]]})
    with pytest.raises(NotFiltrationPreserving):
        truncation(complex_, Fraction(1))


def random_unipotent(rng):
    k = rng.choice([-3, -2, -1, 1, 2, 3])
    return [[1, k], [0, 1]] if rng.random() < 0.5 else [[1, 0], [k, 1]]


@pytest.mark.parametrize("seed", range(5))
def test_seeded_squares_are_flagged_and_corrected(seed):
    rng = random.Random(seed)
    comparisons = [random_unipotent(rng) for _ in range(3)]
    system = constant_system(comparisons)

    # Every square whose two comparison maps differ is reported
    flagged = {r.square for r in verify_system(system)}
    assert flagged == {d for d in range(2) if comparisons[d] != comparisons[d + 1]}
    if flagged:
        with pytest.raises(SystemNotCommuting):
            direct_limit(system)

    for d in range(2):
        system.correctors[d] = compute_corrector(system.comparisons[d], system.comparisons[d + 1],
                                                 system.inclusions[d], system.target_inclusions[d])
    assert verify_system(system) == []
    result = direct_limit(system)
    assert result.stable_from == 0
    assert all(result.restriction_defects(d) == {} for d in range(3))


def test_residual_line():
    system = constant_system([[[1, 0], [0, 1]], [[1, 1], [0, 1]]])
    (residual,) = verify_system(system)
    assert residual.line() == "RESIDUAL kind=square square=0 degree=0 matrix=[0,-1;0,0]"


def test_non_injective_inclusion_is_reported():
    C = plane()
    ident = ChainMap.identity(C)
    collapse = ChainMap(C, C, {0: [[1, 1], [0, 0]]})
    system = DirectedSystem((C, C), (collapse,), (C, C), (collapse,), (ident, ident))
    assert "inclusion" in {r.kind for r in verify_system(system)}


def test_corrector_requirements():
    C = plane()
    ident = ChainMap.identity(C)
    doubled = ChainMap(C, C, {0: [[2, 0], [0, 2]]})
    with pytest.raises(NotIsomorphism):
        compute_corrector(doubled, ident, ident, ident)
    with pytest.raises(SystemNotCommuting):
        compute_corrector(ident, ident, ident, doubled)


def test_system_shape_is_checked():
    C = plane()
    with pytest.raises(ValueError):
        DirectedSystem((C, C), (), (C, C), (), (ChainMap.identity(C),) * 2)
