"""Concrete countable discrete groups, Folner sequences, and invariance measures.

Elements are canonical hashable encodings: integer tuples for the lattices
Z and Z^d, arbitrary orderable encodings for user-supplied groups.  All set
arithmetic is exact; ratios are exact integer counts divided as floats.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, Sequence

Element = Any


def _tuple_add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def _tuple_neg(a: tuple) -> tuple:
    return tuple(-x for x in a)


@dataclass(frozen=True)
class GroupModel:
    """A countable discrete group given by explicit multiplication data.

    ``mul``/``inv``/``identity`` must satisfy the group axioms on every
    element they are fed; ``check_axioms`` spot-checks them on a finite
    sample.  Equal elements must have equal (and orderable) encodings.
    """

    name: str
    mul: Callable[[Element, Element], Element]
    inv: Callable[[Element], Element]
    identity: Element
    dim: int | None = None  # set for the integer lattices Z^d

    @staticmethod
    def integers() -> "GroupModel":
        return GroupModel.lattice(1)

    @staticmethod
    def lattice(d: int) -> "GroupModel":
        if d < 1:
            raise ValueError(f"lattice dimension must be >= 1, got {d}")
        name = "Z" if d == 1 else f"Z{d}"
        return GroupModel(name=name, mul=_tuple_add, inv=_tuple_neg, identity=(0,) * d, dim=d)

    @staticmethod
    def custom(name: str, mul: Callable, inv: Callable, identity: Element) -> "GroupModel":
        """Group from a user-supplied multiplication rule (canonical encodings)."""
        return GroupModel(name=name, mul=mul, inv=inv, identity=identity, dim=None)

    def canon(self, el: Element) -> Element:
        """Normalize an element encoding (plain ints are accepted for Z)."""
        if self.dim is not None:
            if isinstance(el, int):
                if self.dim != 1:
                    raise ValueError(f"scalar element {el} given for {self.name}")
                return (el,)
            t = tuple(int(x) for x in el)
            if len(t) != self.dim:
                raise ValueError(f"element {el!r} has wrong length for {self.name}")
            return t
        return el

    def check_axioms(self, elements: Sequence[Element], max_triples: int = 2000) -> list[str]:
        """Return violations of associativity / identity / inverse laws on a sample."""
        violations: list[str] = []
        els = [self.canon(e) for e in elements]
        for a in els:
            if self.mul(a, self.identity) != a or self.mul(self.identity, a) != a:
                violations.append(f"identity law fails at {a!r}")
            if self.mul(a, self.inv(a)) != self.identity:
                violations.append(f"inverse law fails at {a!r}")
        for a, b, c in itertools.islice(itertools.product(els, repeat=3), max_triples):
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                violations.append(f"associativity fails at ({a!r}, {b!r}, {c!r})")
        return violations


@dataclass(frozen=True)
class FiniteSubset:
    """Nonempty finite subset of a group, with exact membership."""

    group: GroupModel
    elements: frozenset

    @staticmethod
    def of(group: GroupModel, elements: Iterable[Element]) -> "FiniteSubset":
        els = frozenset(group.canon(e) for e in elements)
        if not els:
            raise ValueError("finite subset must be nonempty")
        return FiniteSubset(group=group, elements=els)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(sorted(self.elements))

    def __contains__(self, el: Element) -> bool:
        return self.group.canon(el) in self.elements

    def translate_right(self, g: Element) -> "FiniteSubset":
        """The set {a·g : a in self}."""
        g = self.group.canon(g)
        mul = self.group.mul
        return FiniteSubset(self.group, frozenset(mul(a, g) for a in self.elements))

    def inverse(self) -> "FiniteSubset":
        inv = self.group.inv
        return FiniteSubset(self.group, frozenset(inv(a) for a in self.elements))


def product_set(K: FiniteSubset, A: FiniteSubset) -> frozenset:
    """The product set KA = {k·a : k in K, a in A}."""
    mul = A.group.mul
    return frozenset(mul(k, a) for k in K.elements for a in A.elements)


def box(group: GroupModel, sides: int | Sequence[int], origin: Sequence[int] | None = None) -> FiniteSubset:
    """Axis-aligned box in Z^d: the product of [o_i, o_i + side_i)."""
    if group.dim is None:
        raise ValueError(f"box subsets require a lattice group, got {group.name}")
    d = group.dim
    if isinstance(sides, int):
        sides = [sides] * d
    if len(sides) != d:
        raise ValueError("one side length per lattice dimension required")
    if any(s < 1 for s in sides):
        raise ValueError("box sides must be >= 1")
    org = tuple(origin) if origin is not None else (0,) * d
    ranges = [range(o, o + s) for o, s in zip(org, sides)]
    return FiniteSubset(group, frozenset(itertools.product(*ranges)))


def invariance_defect(A: FiniteSubset, K: FiniteSubset) -> float:
    """The ratio |KA symdiff A| / |A| for finite sets A, K."""
    if len(A) == 0 or len(K) == 0:
        raise ValueError("invariance defect needs nonempty A and K")
    ka = product_set(K, A)
    return len(ka.symmetric_difference(A.elements)) / len(A)


def is_invariant(A: FiniteSubset, K: FiniteSubset, delta: float) -> bool:
    """Whether A is (K, delta)-invariant: |KA symdiff A| / |A| < delta."""
    return invariance_defect(A, K) < delta


@dataclass(frozen=True)
class FolnerSequence:
    """Indexed family n -> finite subset, expected to be asymptotically invariant.

    The limit statement is a contract on the generator, not a runtime check;
    ``defect_sequence`` and ``tempered_constant`` certify finite prefixes.
    """

    name: str
    group: GroupModel
    sets: Callable[[int], FiniteSubset]

    def __call__(self, n: int) -> FiniteSubset:
        if n < 1:
            raise ValueError(f"Folner index must be >= 1, got {n}")
        return self.sets(n)


@dataclass(frozen=True)
class _BoxSets:
    group: GroupModel
    aspect: tuple[int, ...]

    def __call__(self, n: int) -> FiniteSubset:
        return box(self.group, [a * n for a in self.aspect])


def folner_boxes(group: GroupModel) -> FolnerSequence:
    """The standard box sequence n -> [0, n)^d for Z or Z^d."""
    if group.dim is None:
        raise ValueError(f"folner_boxes supports Z and Z^d only, got {group.name}")
    return FolnerSequence(name="boxes", group=group, sets=_BoxSets(group, (1,) * group.dim))


def folner_rects(group: GroupModel, aspect: Sequence[int]) -> FolnerSequence:
    """Rectangle sequence n -> prod [0, aspect_i * n): a second Folner family for cross-checks."""
    if group.dim is None:
        raise ValueError(f"folner_rects supports Z and Z^d only, got {group.name}")
    asp = tuple(int(a) for a in aspect)
    if len(asp) != group.dim or any(a < 1 for a in asp):
        raise ValueError("aspect must give a positive factor per dimension")
    return FolnerSequence(
        name="rects" + "x".join(map(str, asp)),
        group=group,
        sets=_BoxSets(group, asp),
    )


def defect_sequence(F: FolnerSequence, K: FiniteSubset, n_range: Iterable[int]) -> list[float]:
    """invariance_defect(F_n, K) along the requested indices."""
    return [invariance_defect(F(n), K) for n in n_range]


def tempered_constant(F: FolnerSequence, up_to_n: int) -> float:
    """Least C certifying the Shulman condition |union_{k<n} F_k^{-1} F_n| <= C |F_n| on a prefix.

    Returns max over 2 <= n <= up_to_n of the exact ratio; monotone
    non-decreasing in ``up_to_n``.
    """
    if up_to_n < 2:
        raise ValueError(f"up_to_n must be >= 2, got {up_to_n}")
    mul = F.group.mul
    prefix = [F(n) for n in range(1, up_to_n + 1)]
    inverses = [s.inverse() for s in prefix]
    worst = 0.0
    for n in range(2, up_to_n + 1):
        fn = prefix[n - 1]
        union: set = set()
        for k in range(1, n):
            inv_k = inverses[k - 1]
            union.update(mul(a, b) for a in inv_k.elements for b in fn.elements)
        worst = max(worst, len(union) / len(fn))
    return worst


def tempered_subsequence(F: FolnerSequence, up_to_n: int, C: float) -> list[int]:
    """Greedy subsequence of indices along which the Shulman ratio stays <= C.

    No claim is made beyond the returned prefix; whether a whole Folner
    sequence can be made tempered is open.
    """
    if up_to_n < 1:
        raise ValueError(f"up_to_n must be >= 1, got {up_to_n}")
    mul = F.group.mul
    chosen: list[int] = []
    chosen_inverses: list[FiniteSubset] = []
    for n in range(1, up_to_n + 1):
        fn = F(n)
        union: set = set()
        for inv_k in chosen_inverses:
            union.update(mul(a, b) for a in inv_k.elements for b in fn.elements)
        if not chosen or len(union) / len(fn) <= C:
            chosen.append(n)
            chosen_inverses.append(fn.inverse())
    return chosen


def element_to_json(el: Element) -> list:
    if isinstance(el, tuple):
        return [int(x) for x in el]
    if isinstance(el, int):
        return [el]
    raise TypeError(f"cannot serialize group element {el!r}")


def subset_to_json(A: FiniteSubset) -> list[list]:
    return [element_to_json(e) for e in A]


def subset_from_json(group: GroupModel, data: Sequence[Sequence[int]]) -> FiniteSubset:
    return FiniteSubset.of(group, [tuple(v) for v in data])
