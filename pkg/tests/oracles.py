"""Independent brute-force oracles used by the test suite.

Everything here recomputes quantities from their definitions with plain
Python (sets, itertools, math.log) or exhaustive enumeration, deliberately
avoiding the library's own code paths.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


# --- set arithmetic -------------------------------------------------------


def defect_bruteforce(A: set, K: set, add) -> float:
    ka = {add(k, a) for k in K for a in A}
    return len(ka ^ A) / len(A)


def tempered_bruteforce(sets: list[set], add, neg) -> float:
    """max over n >= 2 of |union_{k<n} F_k^-1 F_n| / |F_n| for a prefix list."""
    worst = 0.0
    for n in range(2, len(sets) + 1):
        fn = sets[n - 1]
        union: set = set()
        for k in range(1, n):
            inv = {neg(a) for a in sets[k - 1]}
            union |= {add(a, b) for a in inv for b in fn}
        worst = max(worst, len(union) / len(fn))
    return worst


# --- tilings --------------------------------------------------------------


def density_bruteforce(shape: set, centers: list, window: set, add) -> float:
    """Count cells of whole tiles inside the window, divided by |window|."""
    cells = 0
    for c in centers:
        tile = {add(s, c) for s in shape}
        if tile <= window:
            cells += len(tile)
    return cells / len(window)


def multiplicity_bruteforce(centers: set, H: list, add) -> list[int]:
    """m(h) = #{g in H : h + g in centers}, by the double loop."""
    return [sum(1 for g in H if add(h, g) in centers) for h in H]


# --- metric space search --------------------------------------------------


def max_separated_exhaustive(points: list, dist, eps: float) -> int:
    """Largest eps-separated subset by combination enumeration (tiny n only)."""
    n = len(points)
    best = 0
    for r in range(n, 0, -1):
        for comb in itertools.combinations(range(n), r):
            if all(dist(points[a], points[b]) >= eps for a, b in itertools.combinations(comb, 2)):
                return r
    return best


def min_cover_exhaustive(points: list, dist, eps: float) -> int:
    """Minimal number of diameter-<eps subsets covering the points (tiny n)."""
    n = len(points)
    cliques = []
    for r in range(1, n + 1):
        for comb in itertools.combinations(range(n), r):
            if all(dist(points[a], points[b]) < eps for a, b in itertools.combinations(comb, 2)):
                cliques.append(frozenset(comb))
    universe = frozenset(range(n))
    for r in range(1, n + 1):
        for chosen in itertools.combinations(cliques, r):
            if frozenset().union(*chosen) == universe:
                return r
    return n


# --- information ----------------------------------------------------------


def entropy_bruteforce(probs) -> float:
    return -sum(p * math.log(p) for p in probs if p > 0)


def mi_bruteforce(matrix) -> float:
    m = [list(row) for row in matrix]
    px = [sum(row) for row in m]
    py = [sum(m[i][j] for i in range(len(m))) for j in range(len(m[0]))]
    total = 0.0
    for i, row in enumerate(m):
        for j, p in enumerate(row):
            if p > 0:
                total += p * math.log(p / (px[i] * py[j]))
    return total


def binary_rd_closed_form(distortion: float) -> float:
    """R(D) = log 2 - H(D) for the uniform binary source under Hamming loss."""
    if distortion >= 0.5:
        return 0.0
    h = -distortion * math.log(distortion) - (1 - distortion) * math.log(1 - distortion)
    return math.log(2) - h


# --- grid-search rate-distortion oracle ------------------------------------


def _batch_rate_dist(mu, rho, kernels):
    """Rates and distortions for a (m, nx, ny) batch of kernels, direct formula."""
    joint = mu[None, :, None] * kernels
    dist = (joint * rho[None, :, :]).sum(axis=(1, 2))
    py = joint.sum(axis=1)  # (m, ny)
    denom = mu[None, :, None] * py[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = joint * np.log(joint / denom)
    terms[joint <= 0] = 0.0
    return terms.sum(axis=(1, 2)), dist


def rd_grid_oracle(
    mu,
    rho,
    target: float,
    steps: int = 50,
    levels: int = 3,
    window: float = 2.0,
) -> float:
    """Minimal rate over gridded kernels with distortion <= target.

    Each kernel row lives on a simplex grid with ``steps`` points per free
    parameter; after each pass the grid is recentered on the incumbent and
    refined (the objective and the feasible set are convex, so the optimum
    stays within a cell of the incumbent).  Pure enumeration with the direct
    mutual-information formula; no use of the solver's exponential tilt.
    """
    mu = np.asarray(mu, dtype=float)
    rho = np.asarray(rho, dtype=float)
    nx, ny = rho.shape
    free = nx * (ny - 1)
    if free > 4:
        raise ValueError("grid oracle limited to 4 free kernel parameters")

    lo = np.zeros(free)
    hi = np.ones(free)
    best_rate = math.inf
    best_params = None
    for _ in range(levels):
        axes = [np.linspace(lo[k], hi[k], steps + 1) for k in range(free)]
        grids = np.meshgrid(*axes, indexing="ij")
        params = np.stack([g.ravel() for g in grids], axis=1)  # (m, free)
        rows = params.reshape(-1, nx, ny - 1)
        last = 1.0 - rows.sum(axis=2)
        valid = np.all(last >= -1e-12, axis=1)
        rows = rows[valid]
        pts = params[valid]
        kernels = np.concatenate([rows, np.clip(last[valid], 0.0, 1.0)[:, :, None]], axis=2)
        rates, dists = _batch_rate_dist(mu, rho, kernels)
        feasible = dists <= target
        center = None
        if feasible.any():
            idx_local = int(np.argmin(np.where(feasible, rates, np.inf)))
            if rates[idx_local] < best_rate:
                best_rate = float(rates[idx_local])
                best_params = pts[idx_local].copy()
            center = pts[idx_local].copy()
        if center is None:
            center = best_params if best_params is not None else (lo + hi) / 2.0
        span = (hi - lo) / steps * window
        lo = np.clip(center - span, 0.0, 1.0)
        hi = np.clip(center + span, 0.0, 1.0)
    return best_rate
