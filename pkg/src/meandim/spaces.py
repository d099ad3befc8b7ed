"""Finite metric models of a shift system: orbit metrics and covering numbers.

The state space is always a finite quantization A^W of the original system;
all covering/separation quantities on it are exact set computations.  Minimal
covers by diameter-bounded sets are NP-hard in general, so instances above
``EXACT_COVER_MAX`` points get an honest (lower, upper) bracket instead of a
silently heuristic value.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Literal, Sequence

import numpy as np

from .groups import Element, FiniteSubset, GroupModel

Config = tuple[int, ...]  # alphabet indices, ordered by the sorted window

EXACT_COVER_MAX = 20


def validate_metric(metric: np.ndarray) -> None:
    """Exhaustively check symmetry, identity of indiscernibles, triangle inequality."""
    m = np.asarray(metric, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("metric must be a square matrix")
    if np.any(m < 0):
        raise ValueError("metric has negative entries")
    if np.any(np.diag(m) != 0):
        raise ValueError("metric diagonal must be zero")
    n = m.shape[0]
    if np.any(m[~np.eye(n, dtype=bool)] <= 0):
        raise ValueError("distinct symbols must have positive distance")
    if not np.array_equal(m, m.T):
        raise ValueError("metric must be symmetric")
    # triangle: d(i,k) <= d(i,j) + d(j,k) for all triples
    if np.any(m[:, None, :] > m[:, :, None] + m[None, :, :] + 1e-15):
        raise ValueError("metric violates the triangle inequality")


@dataclass(frozen=True)
class SystemModel:
    """Finite-alphabet shift with a coordinate metric over a lattice window."""

    alphabet: tuple[float, ...]
    metric: np.ndarray
    group: GroupModel
    window: FiniteSubset

    def __post_init__(self) -> None:
        validate_metric(self.metric)
        if len(self.alphabet) != self.metric.shape[0]:
            raise ValueError("metric size must match alphabet size")

    @property
    def diam(self) -> float:
        return float(self.metric.max())

    def coords(self, F: FiniteSubset | None = None) -> list[Element]:
        return sorted((F or self.window).elements)

    def n_configs(self, F: FiniteSubset | None = None) -> int:
        return len(self.alphabet) ** len(F or self.window)

    def configurations(self, F: FiniteSubset | None = None) -> Iterator[Config]:
        """All alphabet-index tuples over the sorted window, in product order."""
        k = len(self.coords(F))
        return itertools.product(range(len(self.alphabet)), repeat=k)

    def _box_dims(self, F: FiniteSubset) -> tuple[int, ...]:
        els = F.elements
        d = self.group.dim
        if d is None:
            raise ValueError("shifts require a lattice group")
        lo = tuple(min(e[i] for e in els) for i in range(d))
        hi = tuple(max(e[i] for e in els) for i in range(d))
        dims = tuple(h - l + 1 for l, h in zip(lo, hi))
        if math.prod(dims) != len(els) or lo != (0,) * d:
            raise ValueError("periodic shifts require a full box window at the origin")
        return dims

    def shift(self, x: Config, g: Element, F: FiniteSubset | None = None) -> Config:
        """Right shift (g.x)_h = x_{h g}, with periodic extension over a box window."""
        F = F or self.window
        g = self.group.canon(g)
        dims = self._box_dims(F)
        coords = self.coords(F)
        pos = {c: i for i, c in enumerate(coords)}
        out = []
        for h in coords:
            target = tuple((hi + gi) % di for hi, gi, di in zip(h, g, dims))
            out.append(x[pos[target]])
        return tuple(out)

    def orbit_metric(self, kind: Literal["max", "avg"], F: FiniteSubset | None = None) -> "OrbitMetric":
        return OrbitMetric(kind=kind, window=F or self.window, metric=self.metric)

    def symbols(self, x: Config) -> tuple[float, ...]:
        return tuple(self.alphabet[i] for i in x)


@dataclass(frozen=True)
class OrbitMetric:
    """Max (d_F) or average (dbar_F) of coordinate distances over a window."""

    kind: Literal["max", "avg"]
    window: FiniteSubset
    metric: np.ndarray

    def dist(self, x: Config, y: Config) -> float:
        if len(x) != len(self.window) or len(y) != len(self.window):
            raise ValueError("configuration length does not match the metric window")
        d = self.metric[np.asarray(x), np.asarray(y)]
        return float(d.max()) if self.kind == "max" else float(d.mean())

    def dist_to_many(self, x: Config, ys: np.ndarray) -> np.ndarray:
        """Distances from one configuration to the rows of an index array."""
        d = self.metric[np.asarray(x)[None, :], ys]
        return d.max(axis=1) if self.kind == "max" else d.mean(axis=1)


def _as_array(points: Sequence[Config]) -> np.ndarray:
    return np.asarray(list(points), dtype=np.intp)


def separated_set(points: Sequence[Config], m: OrbitMetric, eps: float) -> list[Config]:
    """Greedy-maximal eps-separated subset in first-fit order.

    Every excluded point is within eps of a kept one, so the result is
    maximal (no point can be added); it need not have maximum cardinality.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    pts = list(points)
    if not pts:
        return []
    arr = _as_array(pts)
    kept_idx: list[int] = []
    for i, x in enumerate(pts):
        if not kept_idx:
            kept_idx.append(i)
            continue
        d = m.dist_to_many(x, arr[kept_idx])
        if np.all(d >= eps):
            kept_idx.append(i)
    return [pts[i] for i in kept_idx]


def is_maximal_separated(points: Sequence[Config], subset: Sequence[Config], m: OrbitMetric, eps: float) -> bool:
    """Certificate: subset pairwise >= eps and every other point within < eps of it."""
    sub = list(subset)
    arr = _as_array(sub)
    for i, x in enumerate(sub):
        d = m.dist_to_many(x, arr)
        d[i] = np.inf
        if np.any(d < eps):
            return False
    kept = set(sub)
    for x in points:
        if x in kept:
            continue
        if np.all(m.dist_to_many(x, arr) >= eps):
            return False
    return True


def max_separated_size_exact(points: Sequence[Config], m: OrbitMetric, eps: float) -> int:
    """Maximum cardinality of an eps-separated subset, by branch and bound.

    Exhaustive-scale oracle; intended for small instances only.
    """
    pts = list(points)
    n = len(pts)
    if n > 24:
        raise ValueError(f"exact search limited to 24 points, got {n}")
    arr = _as_array(pts)
    # compat[i] = bitmask of j > i with dist >= eps
    compat = []
    for i in range(n):
        d = m.dist_to_many(pts[i], arr)
        mask = 0
        for j in range(i + 1, n):
            if d[j] >= eps:
                mask |= 1 << j
        compat.append(mask)

    best = 0

    def grow(candidates: int, size: int) -> None:
        nonlocal best
        if size + candidates.bit_count() <= best:
            return
        if candidates == 0:
            best = max(best, size)
            return
        i = (candidates & -candidates).bit_length() - 1
        grow(candidates & compat[i] & ~((1 << (i + 1)) - 1), size + 1)  # take i
        grow(candidates & ~(1 << i), size)  # skip i
    grow((1 << n) - 1, 0)
    return best


def _clique_masks(adj: list[int], n: int) -> list[int]:
    """All maximal cliques of the graph given by adjacency bitmasks (Bron-Kerbosch)."""
    cliques: list[int] = []

    def expand(r: int, p: int, x: int) -> None:
        if p == 0 and x == 0:
            cliques.append(r)
            return
        pivot_candidates = p | x
        u = (pivot_candidates & -pivot_candidates).bit_length() - 1
        best_u, best_cnt = u, -1
        pc = pivot_candidates
        while pc:
            v = (pc & -pc).bit_length() - 1
            cnt = (p & adj[v]).bit_count()
            if cnt > best_cnt:
                best_u, best_cnt = v, cnt
            pc &= pc - 1
        ext = p & ~adj[best_u]
        while ext:
            v = (ext & -ext).bit_length() - 1
            bit = 1 << v
            expand(r | bit, p & adj[v], x & adj[v])
            p &= ~bit
            x |= bit
            ext &= ext - 1

    expand(0, (1 << n) - 1, 0)
    return cliques


def min_cover_exact(points: Sequence[Config], m: OrbitMetric, eps: float) -> int:
    """Exact minimal number of diameter-<eps sets covering the points.

    Diameter-<eps sets are cliques of the 'dist < eps' graph, so this is a
    minimum clique cover, solved by branch and bound over maximal cliques.
    """
    pts = list(points)
    n = len(pts)
    if n == 0:
        return 0
    if n > EXACT_COVER_MAX:
        raise ValueError(f"exact cover limited to {EXACT_COVER_MAX} points, got {n}")
    arr = _as_array(pts)
    adj = []
    for i in range(n):
        d = m.dist_to_many(pts[i], arr)
        mask = 0
        for j in range(n):
            if j != i and d[j] < eps:
                mask |= 1 << j
        adj.append(mask)
    cliques = _clique_masks(adj, n)
    full = (1 << n) - 1
    best = n  # singletons always cover

    def search(uncovered: int, used: int) -> None:
        nonlocal best
        if used >= best:
            return
        if uncovered == 0:
            best = used
            return
        i = (uncovered & -uncovered).bit_length() - 1
        for cl in cliques:
            if cl & (1 << i):
                search(uncovered & ~cl, used + 1)

    search(full, 0)
    return best


MAX_GAIN_COVER_LIMIT = 600


def greedy_ball_cover(points: Sequence[Config], m: OrbitMetric, eps: float) -> int:
    """Greedy cover by open balls of radius eps/2 (hence diameter < eps).

    Small instances use max-gain selection; larger ones fall back to first-fit
    ball placement, which is still a valid (just looser) upper bound.
    """
    pts = list(points)
    n = len(pts)
    arr = _as_array(pts)
    uncovered = np.ones(n, dtype=bool)
    count = 0
    if n <= MAX_GAIN_COVER_LIMIT:
        balls = np.zeros((n, n), dtype=bool)
        for i in range(n):
            balls[i] = m.dist_to_many(pts[i], arr) < eps / 2
            balls[i, i] = True
        while uncovered.any():
            gains = (balls & uncovered[None, :]).sum(axis=1)
            best_i = int(np.argmax(gains))
            uncovered &= ~balls[best_i]
            count += 1
        return count
    for i in range(n):
        if uncovered[i]:
            ball = m.dist_to_many(pts[i], arr) < eps / 2
            ball[i] = True
            uncovered &= ~ball
            count += 1
    return count


def covering_number(points: Sequence[Config], m: OrbitMetric, eps: float) -> tuple[int, int]:
    """Bracket (lower, upper) for the minimal diameter-<eps cover cardinality.

    Lower: size of a greedy eps-separated set (each cover cell holds at most
    one of its points).  Upper: greedy cover by balls of radius eps/2.  For
    instances up to EXACT_COVER_MAX points the exact minimum replaces both.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    pts = list(points)
    if len(pts) <= EXACT_COVER_MAX:
        exact = min_cover_exact(pts, m, eps)
        return exact, exact
    lower = len(separated_set(pts, m, eps))
    upper = greedy_ball_cover(pts, m, eps)
    return lower, upper


def tame_growth_profile(
    model: SystemModel,
    eps_grid: Sequence[float],
    deltas: Sequence[float] = (0.25, 0.5, 1.0, 2.0),
) -> list[dict]:
    """Diagnostic table of eps^delta * log #(A, d_A, eps) on the base alphabet.

    Purely descriptive: tame growth is a limit statement, so no pass/fail.
    """
    if any(a >= b for a, b in zip(eps_grid[1:], eps_grid)):
        raise ValueError("eps_grid must be strictly decreasing")
    points = [(i,) for i in range(len(model.alphabet))]
    base = OrbitMetric(kind="max", window=_singleton_window(model), metric=model.metric)
    rows = []
    for eps in eps_grid:
        lower, upper = covering_number(points, base, eps)
        for delta in deltas:
            rows.append(
                {
                    "eps": eps,
                    "delta": delta,
                    "cover_lower": lower,
                    "cover_upper": upper,
                    "value": eps**delta * math.log(upper),
                }
            )
    return rows


def _singleton_window(model: SystemModel) -> FiniteSubset:
    return FiniteSubset.of(model.group, [model.group.identity])


def model_to_json(model: SystemModel) -> dict:
    from .groups import subset_to_json

    return {
        "alphabet": list(model.alphabet),
        "metric": model.metric.tolist(),
        "group": model.group.name,
        "window": subset_to_json(model.window),
    }


def model_from_json(data: dict, group: GroupModel) -> SystemModel:
    from .groups import subset_from_json

    return SystemModel(
        alphabet=tuple(data["alphabet"]),
        metric=np.asarray(data["metric"], dtype=float),
        group=group,
        window=subset_from_json(group, data["window"]),
    )
