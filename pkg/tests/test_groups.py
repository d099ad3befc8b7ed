import itertools

import numpy as np
import pytest

from meandim.groups import (
    FiniteSubset,
    FolnerSequence,
    GroupModel,
    box,
    defect_sequence,
    folner_boxes,
    folner_rects,
    invariance_defect,
    is_invariant,
    subset_from_json,
    subset_to_json,
    tempered_constant,
    tempered_subsequence,
)
from oracles import defect_bruteforce, tempered_bruteforce


def add1(a, b):
    return (a[0] + b[0],)


def neg1(a):
    return (-a[0],)


def test_lattice_axioms():
    for d in (1, 2, 3):
        g = GroupModel.lattice(d)
        sample = [tuple(v) for v in itertools.product((-1, 0, 2), repeat=d)]
        assert g.check_axioms(sample) == []


def test_custom_group_axioms():
    g = GroupModel.custom("C5", mul=lambda a, b: (a + b) % 5, inv=lambda a: (-a) % 5, identity=0)
    assert g.check_axioms(list(range(5))) == []


def test_custom_group_broken_axioms_reported():
    g = GroupModel.custom("bad", mul=lambda a, b: a, inv=lambda a: a, identity=0)
    violations = g.check_axioms([0, 1])
    assert any("identity" in v or "inverse" in v for v in violations)


def test_invariance_defect_interval():
    g = GroupModel.integers()
    A = FiniteSubset.of(g, range(100))
    K = FiniteSubset.of(g, [-1, 0, 1])
    # KA = {-1..100}, symmetric difference {-1, 100}
    assert invariance_defect(A, K) == 2 / 100


def test_invariance_defect_identity():
    g = GroupModel.integers()
    e = FiniteSubset.of(g, [0])
    assert invariance_defect(e, e) == 0.0


def test_invariance_defect_square():
    g = GroupModel.lattice(2)
    A = box(g, 10)
    K = FiniteSubset.of(g, [(0, 0), (1, 0), (0, 1)])
    assert invariance_defect(A, K) == 20 / 100


def test_invariance_defect_matches_bruteforce():
    g = GroupModel.lattice(2)
    rng = np.random.default_rng(7)
    for _ in range(20):
        a_els = {tuple(v) for v in rng.integers(-4, 5, size=(rng.integers(1, 12), 2))}
        k_els = {tuple(v) for v in rng.integers(-2, 3, size=(rng.integers(1, 4), 2))}
        A = FiniteSubset.of(g, a_els)
        K = FiniteSubset.of(g, k_els)
        expect = defect_bruteforce(
            set(A.elements), set(K.elements), lambda k, a: (k[0] + a[0], k[1] + a[1])
        )
        assert invariance_defect(A, K) == expect


def test_invariance_defect_right_translation_invariant():
    g = GroupModel.integers()
    A = FiniteSubset.of(g, range(10))
    K = FiniteSubset.of(g, [-1, 0, 1])
    base = invariance_defect(A, K)
    for shift in (-3, 5, 17):
        assert invariance_defect(A.translate_right((shift,)), K) == base


def test_invariance_defect_empty_errors():
    g = GroupModel.integers()
    with pytest.raises(ValueError):
        FiniteSubset.of(g, [])


def test_is_invariant_thresholds():
    g = GroupModel.integers()
    A = FiniteSubset.of(g, range(100))
    K = FiniteSubset.of(g, [-1, 0, 1])
    assert is_invariant(A, K, 0.05)
    assert not is_invariant(A, K, 0.01)
    assert is_invariant(A, FiniteSubset.of(g, [0]), 1e-12)


def test_folner_boxes_examples():
    z = GroupModel.integers()
    assert set(folner_boxes(z)(3).elements) == {(0,), (1,), (2,)}
    assert set(folner_boxes(z)(1).elements) == {(0,)}
    z2 = GroupModel.lattice(2)
    assert set(folner_boxes(z2)(2).elements) == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_folner_boxes_rejects_custom_group():
    g = GroupModel.custom("C5", mul=lambda a, b: (a + b) % 5, inv=lambda a: (-a) % 5, identity=0)
    with pytest.raises(ValueError):
        folner_boxes(g)


def test_defect_decreases_with_doubling():
    for g, kset in ((GroupModel.integers(), [(-1,), (0,), (1,)]), (GroupModel.lattice(2), [(0, 0), (1, 1)])):
        F = folner_boxes(g)
        K = FiniteSubset.of(g, kset)
        for n in (2, 3, 5):
            assert invariance_defect(F(2 * n), K) <= invariance_defect(F(n), K)


def test_defect_sequence_tends_down():
    g = GroupModel.integers()
    F = folner_boxes(g)
    K = FiniteSubset.of(g, [-1, 0, 1])
    d = defect_sequence(F, K, range(2, 30, 4))
    assert all(a >= b for a, b in zip(d, d[1:]))
    assert d[-1] < 0.1


def test_tempered_constant_boxes_z():
    F = folner_boxes(GroupModel.integers())
    # oracle: explicit set arithmetic over the same prefix
    sets = [set(F(n).elements) for n in range(1, 4)]
    expect = tempered_bruteforce(sets, add1, neg1)
    got = tempered_constant(F, 3)
    assert got == expect == pytest.approx(4 / 3)


def test_tempered_constant_boxes_z2():
    F = folner_boxes(GroupModel.lattice(2))
    sets = [set(F(n).elements) for n in range(1, 5)]
    expect = tempered_bruteforce(
        sets, lambda a, b: (a[0] + b[0], a[1] + b[1]), lambda a: (-a[0], -a[1])
    )
    assert tempered_constant(F, 4) == expect == pytest.approx(2.25)


def test_tempered_constant_constant_sequence():
    g = GroupModel.integers()
    F = FolnerSequence("const", g, lambda n: FiniteSubset.of(g, [0]))
    assert tempered_constant(F, 5) == 1.0


def test_tempered_constant_monotone():
    F = folner_boxes(GroupModel.integers())
    values = [tempered_constant(F, n) for n in range(2, 8)]
    assert all(a <= b for a, b in zip(values, values[1:]))


def test_tempered_constant_requires_two():
    F = folner_boxes(GroupModel.integers())
    with pytest.raises(ValueError):
        tempered_constant(F, 1)


def test_tempered_subsequence_greedy():
    F = folner_boxes(GroupModel.integers())
    chosen = tempered_subsequence(F, 10, C=2.0)
    assert chosen and chosen[0] == 1
    # the chosen prefix really satisfies the bound it claims
    sub = FolnerSequence("sub", F.group, lambda i: F(chosen[i - 1]))
    assert tempered_constant(sub, len(chosen)) <= 2.0


def test_folner_rects_second_family():
    g = GroupModel.lattice(2)
    F = folner_rects(g, (1, 2))
    assert len(F(2)) == 8
    K = FiniteSubset.of(g, [(1, 0)])
    assert invariance_defect(F(8), K) < invariance_defect(F(2), K)


def test_subset_json_roundtrip():
    g = GroupModel.lattice(2)
    A = box(g, 3)
    data = subset_to_json(A)
    assert subset_from_json(g, data).elements == A.elements
    assert all(isinstance(v, list) and len(v) == 2 for v in data)
