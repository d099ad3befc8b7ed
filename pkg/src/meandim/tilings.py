"""Finite exact tilings of a window: shapes, centers, density, multiplicity.

A tiling here is a collection of pairwise disjoint translates ``S_j . c``
(shape times center) whose union is the window minus a reported boundary
remainder.  Existence arguments are replaced by explicit constructions
(grid tilings for Z^d, a randomized greedy tiler elsewhere); the density
and covering-multiplicity statistics are then measured, not derived.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .groups import Element, FiniteSubset, GroupModel


@dataclass(frozen=True)
class FiniteTiling:
    group: GroupModel
    shapes: tuple[FiniteSubset, ...]
    centers: tuple[tuple[Element, ...], ...]  # one center tuple per shape
    window: FiniteSubset

    def __post_init__(self) -> None:
        if len(self.shapes) != len(self.centers):
            raise ValueError("one center list per shape required")

    def tile_cells(self, j: int, c: Element) -> frozenset:
        mul = self.group.mul
        return frozenset(mul(s, c) for s in self.shapes[j].elements)

    def tiles(self):
        """Yield (shape index, center, cells) for every tile."""
        for j in range(len(self.shapes)):
            for c in self.centers[j]:
                yield j, c, self.tile_cells(j, c)

    def covered_cells(self) -> frozenset:
        cells: set = set()
        for _, _, tile in self.tiles():
            cells.update(tile)
        return frozenset(cells)

    def remainder_fraction(self) -> float:
        covered = self.covered_cells() & self.window.elements
        return (len(self.window) - len(covered)) / len(self.window)


@dataclass(frozen=True)
class DensityReport:
    window_size: int
    per_shape: tuple[float, ...]
    total: float


@dataclass(frozen=True)
class TilingReport:
    valid: bool
    violations: tuple[str, ...]
    remainder_fraction: float
    covered_cells: int
    window_size: int


def tile_boxes(group: GroupModel, window: FiniteSubset, shape_side: int) -> FiniteTiling:
    """Grid tiling of a lattice window by boxes of side ``shape_side``.

    Centers sit on the sublattice (shape_side Z)^d; only tiles wholly inside
    the window are kept, the rest is boundary remainder.
    """
    if group.dim is None:
        raise ValueError(f"tile_boxes supports Z and Z^d only, got {group.name}")
    if shape_side < 1:
        raise ValueError(f"shape_side must be >= 1, got {shape_side}")
    d = group.dim
    shape = FiniteSubset.of(group, [tuple(v) for v in np.ndindex(*([shape_side] * d))])
    phases = {tuple(shape_side * math.floor(x / shape_side) for x in w) for w in window.elements}
    centers = []
    for c in sorted(phases):
        if all(tuple(s + x for s, x in zip(sh, c)) in window.elements for sh in shape.elements):
            centers.append(c)
    return FiniteTiling(group=group, shapes=(shape,), centers=(tuple(centers),), window=window)


def tile_greedy(
    group: GroupModel,
    window: FiniteSubset,
    shape: FiniteSubset,
    rng: np.random.Generator,
) -> FiniteTiling:
    """Randomized greedy tiler for groups without a grid structure.

    Scans candidate centers in a seeded random order, placing a tile whenever
    it fits inside the window without overlapping previous tiles.  Quality is
    reported (remainder fraction), not guaranteed.
    """
    if group.identity not in shape.elements:
        raise ValueError("shape must contain the identity")
    mul = group.mul
    candidates = sorted(window.elements)
    order = rng.permutation(len(candidates))
    used: set = set()
    centers: list[Element] = []
    for i in order:
        c = candidates[i]
        tile = [mul(s, c) for s in shape.elements]
        if all(t in window.elements and t not in used for t in tile):
            used.update(tile)
            centers.append(c)
    return FiniteTiling(group=group, shapes=(shape,), centers=(tuple(sorted(centers)),), window=window)


def density(T: FiniteTiling, F: FiniteSubset, j: int) -> float:
    """Portion of F exactly covered by whole tiles of shape j.

    (1/|F|) * #{c in C_j : S_j c subset of F} * |S_j|, computed exactly.
    """
    if not 0 <= j < len(T.shapes):
        raise IndexError(f"shape index {j} out of range")
    whole = sum(1 for c in T.centers[j] if T.tile_cells(j, c) <= F.elements)
    return whole * len(T.shapes[j]) / len(F)


def density_report(T: FiniteTiling, F: FiniteSubset) -> DensityReport:
    per_shape = tuple(density(T, F, j) for j in range(len(T.shapes)))
    return DensityReport(window_size=len(F), per_shape=per_shape, total=sum(per_shape))


def covering_multiplicity(
    T: FiniteTiling, H: FiniteSubset, j: int, eps: float
) -> tuple[int, float]:
    """Multiplicity statistics of the center translates {C_j g^{-1}}, g in H.

    For h in H the multiplicity is m(h) = #{g in H : h·g in C_j}.  Returns
    the max of m over the best (1-eps)-fraction of H, and the fraction of H
    where m(h) <= (1+eps) * rho(S_j, H) * |H| / |S_j|.
    """
    if not 0 <= j < len(T.shapes):
        raise IndexError(f"shape index {j} out of range")
    cj = set(T.centers[j])
    if not cj:
        return 0, 1.0
    mul = T.group.mul
    hs = sorted(H.elements)
    mults = np.array([sum(1 for g in hs if mul(h, g) in cj) for h in hs])
    rho = density(T, H, j)
    threshold = (1.0 + eps) * rho * len(H) / len(T.shapes[j])
    covered_fraction = float(np.mean(mults <= threshold))
    keep = max(1, math.ceil((1.0 - eps) * len(hs)))
    max_mult = int(np.sort(mults)[:keep].max())
    return max_mult, covered_fraction


def _is_right_translate(A: FiniteSubset, B: FiniteSubset) -> bool:
    if len(A) != len(B):
        return False
    mul, inv = A.group.mul, A.group.inv
    a0 = min(A.elements)
    for b in B.elements:
        g = mul(inv(a0), b)
        if frozenset(mul(a, g) for a in A.elements) == B.elements:
            return True
    return False


def validate(T: FiniteTiling) -> TilingReport:
    """Check disjointness, identity-in-shape, and non-translate shapes.

    Violations are listed, not raised; the boundary remainder fraction is
    always reported.
    """
    violations: list[str] = []
    for j, shape in enumerate(T.shapes):
        if T.group.identity not in shape.elements:
            violations.append(f"shape {j} does not contain the identity")
    for j in range(len(T.shapes)):
        for k in range(j + 1, len(T.shapes)):
            if _is_right_translate(T.shapes[j], T.shapes[k]):
                violations.append(f"shapes {j} and {k} are translates of each other")
    seen: set = set()
    total = 0
    for j, c, tile in T.tiles():
        total += len(tile)
        overlap = seen & tile
        if overlap:
            violations.append(f"tile ({j}, {c}) overlaps previous tiles on {len(overlap)} cells")
        if not tile <= T.window.elements:
            violations.append(f"tile ({j}, {c}) leaves the window")
        seen.update(tile)
    covered = len(seen & T.window.elements)
    return TilingReport(
        valid=not violations,
        violations=tuple(violations),
        remainder_fraction=(len(T.window) - covered) / len(T.window),
        covered_cells=covered,
        window_size=len(T.window),
    )


def tiling_to_json(T: FiniteTiling) -> dict:
    from .groups import element_to_json, subset_to_json

    return {
        "shapes": [subset_to_json(s) for s in T.shapes],
        "centers": [[element_to_json(c) for c in cs] for cs in T.centers],
        "window": subset_to_json(T.window),
    }


def tiling_from_json(group: GroupModel, data: dict) -> FiniteTiling:
    from .groups import subset_from_json

    shapes = tuple(subset_from_json(group, s) for s in data["shapes"])
    centers = tuple(tuple(tuple(c) for c in cs) for cs in data["centers"])
    window = subset_from_json(group, data["window"])
    return FiniteTiling(group=group, shapes=shapes, centers=centers, window=window)
