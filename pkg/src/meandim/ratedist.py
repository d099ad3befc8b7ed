"""Window rate-distortion solvers and the invariant-measure candidate models.

The constrained minimization inf { I(X;Y) : E rho(X,Y) < eps } over channel
kernels is solved by alternating minimization at a fixed Lagrange multiplier
s (kernel update nu(y|x) proportional to q(y) exp(-s rho), then marginal
update), with an outer bisection on s to hit the distortion target.  The
objective is convex in the kernel, so the fixed-s subproblem has a computable
duality gap which is reported as a certificate.

Strict distortion targets "< eps" are realized as "<= eps * (1 - 1e-9)" and
the bisection only ever returns states on the feasible side, so reported
distortions are strictly below eps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np
from scipy.special import logsumexp

from .groups import Element, FiniteSubset, FolnerSequence
from .infotheory import Pmf, mutual_information
from .spaces import Config, OrbitMetric, SystemModel, separated_set

STRICT_FACTOR = 1.0 - 1e-9
DEFAULT_BUDGET_CELLS = 1_000_000

DistortionKind = Literal["l1", "lp", "linf"]


@dataclass(frozen=True)
class DistortionSpec:
    """Distortion constraint family for a window solve.

    l1:   E[ mean_g d(x_g, y_g) ]      < eps
    lp:   E[ mean_g d(x_g, y_g)^p ]    < eps^p          (p >= 1)
    linf: E[ mean_g 1{d(x_g,y_g)>=eps}] < alpha          (alpha in (0, 1/2])
    """

    kind: DistortionKind
    p: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("l1", "lp", "linf"):
            raise ValueError(f"unknown distortion kind {self.kind!r}")
        if self.kind == "lp" and self.p < 1:
            raise ValueError(f"lp distortion requires p >= 1, got {self.p}")


@dataclass
class RDResult:
    """One solved point on a window rate-distortion curve (rates in nats)."""

    eps: float
    rate: float
    multiplier: float
    iterations: int
    distortion: float  # on the rho scale (mean d, mean d^p, or exceed fraction)
    target: float  # effective rho-scale target, strictness folded in
    gap: float
    feasible: bool
    converged: bool
    alpha: float | None = None
    p: float = 1.0
    note: str = ""
    kernel: np.ndarray | None = None
    x_outcomes: tuple = ()
    y_outcomes: tuple = ()


def _safe_log(v: np.ndarray) -> np.ndarray:
    out = np.full_like(v, -np.inf, dtype=float)
    np.log(v, out=out, where=v > 0)
    return out


def distortion_matrix(
    model: SystemModel,
    xs: Sequence[Config],
    ys: Sequence[Config],
    spec: DistortionSpec,
    eps: float | None = None,
    block: int = 512,
) -> np.ndarray:
    """Per-pair rho(x, y) for configurations over a common window."""
    X = np.asarray(list(xs), dtype=np.intp)
    Y = np.asarray(list(ys), dtype=np.intp)
    rho = np.empty((X.shape[0], Y.shape[0]))
    for lo in range(0, X.shape[0], block):
        hi = min(lo + block, X.shape[0])
        per = model.metric[X[lo:hi, None, :], Y[None, :, :]]
        if spec.kind == "l1":
            rho[lo:hi] = per.mean(axis=2)
        elif spec.kind == "lp":
            rho[lo:hi] = (per**spec.p).mean(axis=2)
        else:
            if eps is None:
                raise ValueError("linf distortion needs the threshold eps")
            rho[lo:hi] = (per >= eps).mean(axis=2)
    return rho


def _ba_evaluate(
    mu: np.ndarray, rho: np.ndarray, s: float, w: np.ndarray, row_min: np.ndarray, q: np.ndarray
) -> tuple[float, float, np.ndarray, np.ndarray, float]:
    """Kernel, rate, distortion, and duality gap at output marginal q.

    ``w`` holds exp(-s (rho - row_min)); the row shift cancels inside the
    kernel and the Lagrangian tangent bound, so everything here is exact.
    """
    c = w @ q
    kernel = (w * q[None, :]) / c[:, None]
    joint = mu[:, None] * kernel
    q_out = joint.sum(axis=0)
    dist = float((joint * rho).sum())
    rate = mutual_information(joint)
    logc_true = np.log(c) - s * row_min
    lam = (mu / c) @ w
    v_lb = -float(mu @ logc_true) + 1.0 - float(lam.max())
    gap = rate + s * dist - v_lb
    return rate, dist, q_out, kernel, gap


def _ba_fixed_multiplier(
    mu: np.ndarray,
    rho: np.ndarray,
    s: float,
    q0: np.ndarray,
    gap_tol: float,
    max_iter: int,
    check_every: int = 16,
) -> tuple[float, float, np.ndarray, np.ndarray, float, int]:
    """Alternating minimization of I + s * E[rho] at fixed multiplier s.

    Returns (rate, distortion, q, kernel, gap, iterations); ``gap`` bounds the
    distance of rate + s*distortion from the true fixed-s optimum, via the
    convexity (tangent) lower bound at the current output marginal.  The
    update itself is two matvecs per iteration; the certificate is evaluated
    every ``check_every`` iterations.
    """
    row_min = rho.min(axis=1)
    shifted = rho - row_min[:, None]
    if s * float(shifted.max()) > 600.0:
        return _ba_fixed_multiplier_log(mu, rho, s, q0, gap_tol, max_iter)
    w = np.exp(-s * shifted)
    q = np.asarray(q0, dtype=float).copy()
    best = None
    for it in range(1, max_iter + 1):
        c = w @ q
        if np.any(c <= 0.0):
            return _ba_fixed_multiplier_log(mu, rho, s, q0, gap_tol, max_iter)
        q_new = q * ((mu / c) @ w)
        moved = float(np.max(np.abs(q_new - q)))
        q = q_new
        if it % check_every == 0 or it == max_iter or moved < 1e-16:
            rate, dist, q_out, kernel, gap = _ba_evaluate(mu, rho, s, w, row_min, q)
            best = (rate, dist, q_out, kernel, gap, it)
            if gap <= gap_tol or moved < 1e-16:
                return best
    return best  # type: ignore[return-value]


def _ba_fixed_multiplier_log(
    mu: np.ndarray,
    rho: np.ndarray,
    s: float,
    q0: np.ndarray,
    gap_tol: float,
    max_iter: int,
) -> tuple[float, float, np.ndarray, np.ndarray, float, int]:
    """Log-domain variant for extreme multipliers (s * rho beyond exp range)."""
    logmu = _safe_log(mu)
    logq = _safe_log(q0)
    srho = s * rho
    rate = dist = gap = math.inf
    kernel = np.empty_like(rho)
    q = np.asarray(q0, dtype=float)
    for it in range(1, max_iter + 1):
        a = logq[None, :] - srho
        logc = logsumexp(a, axis=1)
        log_lam = logsumexp(logmu[:, None] - srho - logc[:, None], axis=0)
        v_lb = -float(mu @ logc) + 1.0 - float(np.exp(log_lam.max()))
        kernel = np.exp(a - logc[:, None])
        joint = mu[:, None] * kernel
        q = joint.sum(axis=0)
        dist = float((joint * rho).sum())
        rate = mutual_information(joint)
        gap = rate + s * dist - v_lb
        logq = _safe_log(q)
        if gap <= gap_tol:
            return rate, dist, q, kernel, gap, it
    return rate, dist, q, kernel, gap, max_iter


def minimize_rate(
    mu: np.ndarray,
    rho: np.ndarray,
    target: float,
    s_max: float,
    dist_tol: float = 1e-8,
    max_outer: int = 200,
    gap_tol: float = 1e-10,
    max_inner: int = 20_000,
) -> tuple[float, float, float, np.ndarray, float, int, bool, str]:
    """Bisection on the multiplier to meet ``E rho <= target`` with minimal rate.

    Returns (rate, distortion, s, kernel, gap, iterations, converged, note).
    Only feasible states (distortion <= target) are ever returned when the
    target is attainable.
    """
    ny = rho.shape[1]
    d_min = float((mu * rho.min(axis=1)).sum())
    # zero-rate point: the best constant reproduction word
    col_avg = mu @ rho
    best_col = int(np.argmin(col_avg))
    d_zero = float(col_avg[best_col])

    if d_zero <= target:
        kernel = np.zeros_like(rho)
        kernel[:, best_col] = 1.0
        return 0.0, d_zero, 0.0, kernel, 0.0, 0, True, "zero-rate"
    if d_min > target:
        # no kernel achieves the target at all
        nearest = np.zeros_like(rho)
        nearest[np.arange(rho.shape[0]), rho.argmin(axis=1)] = 1.0
        joint = mu[:, None] * nearest
        return mutual_information(joint), d_min, math.inf, nearest, 0.0, 0, False, "infeasible"

    total_iters = 0
    q0 = np.full(ny, 1.0 / ny)
    rate_hi, d_hi, q_hi, k_hi, gap_hi, it = _ba_fixed_multiplier(
        mu, rho, s_max, q0, gap_tol, max_inner
    )
    total_iters += it
    if d_hi > target:
        # target attainable (d_min <= target) but not at s_max: fall back to
        # the deterministic nearest-word kernel, which is always feasible
        nearest = np.zeros_like(rho)
        nearest[np.arange(rho.shape[0]), rho.argmin(axis=1)] = 1.0
        joint = mu[:, None] * nearest
        return (
            mutual_information(joint),
            d_min,
            s_max,
            nearest,
            gap_hi,
            total_iters,
            False,
            "multiplier cap reached; nearest-word fallback",
        )
    s_lo, s_hi = 0.0, s_max
    state = (rate_hi, d_hi, s_hi, k_hi, gap_hi)
    for _ in range(max_outer):
        if target - state[1] <= dist_tol:
            break
        s_mid = 0.5 * (s_lo + s_hi)
        rate_m, d_m, q_m, k_m, gap_m, it = _ba_fixed_multiplier(
            mu, rho, s_mid, q_hi, gap_tol, max_inner
        )
        total_iters += it
        if d_m <= target:
            s_hi = s_mid
            q_hi = q_m
            state = (rate_m, d_m, s_mid, k_m, gap_m)
        else:
            s_lo = s_mid
        if s_hi - s_lo <= 1e-13 * max(1.0, s_max):
            break
    rate, dist, s, kernel, gap = state
    converged = target - dist <= dist_tol
    note = "" if converged else "distortion short of target (curve kink or cap)"
    return rate, dist, s, kernel, gap, total_iters, converged, note


def rd_window(
    mu_marginal: Pmf,
    model: SystemModel,
    spec: DistortionSpec,
    eps: float,
    Y: Sequence[Config] | None = None,
    budget_cells: int = DEFAULT_BUDGET_CELLS,
    s_max: float | None = None,
    dist_tol: float = 1e-8,
    gap_tol: float = 1e-10,
) -> RDResult:
    """R_mu(eps, F) for the L1 or Lp distortion on one window.

    ``mu_marginal`` is a pmf over configurations on the window; ``Y`` is the
    finite reproduction codebook (defaults to the support of the marginal;
    a richer codebook can only lower the value, a poorer one raises it, so
    the result carries explicit upper-bound semantics).
    """
    if spec.kind == "linf":
        raise ValueError("use rd_window_linf for the counting distortion")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    mu = mu_marginal.restrict_support()
    xs = list(mu.outcomes)
    ys = list(Y) if Y is not None else xs
    if not ys:
        raise ValueError("reproduction codebook must be nonempty")
    if len(xs) * len(ys) > budget_cells:
        raise ValueError(
            f"joint size {len(xs)}x{len(ys)} exceeds budget of {budget_cells} cells"
        )
    rho = distortion_matrix(model, xs, ys, spec)
    raw_target = eps if spec.kind == "l1" else eps**spec.p
    target = raw_target * STRICT_FACTOR
    if s_max is None:
        s_max = 50.0 / raw_target
    rate, dist, s, kernel, gap, iters, converged, note = minimize_rate(
        mu.probs, rho, target, s_max, dist_tol=dist_tol, gap_tol=gap_tol
    )
    return RDResult(
        eps=eps,
        rate=rate,
        multiplier=s,
        iterations=iters,
        distortion=dist,
        target=target,
        gap=gap,
        feasible=dist <= target,
        converged=converged,
        p=spec.p if spec.kind == "lp" else 1.0,
        note=note,
        kernel=kernel,
        x_outcomes=tuple(xs),
        y_outcomes=tuple(ys),
    )


def rd_window_linf(
    mu_marginal: Pmf,
    model: SystemModel,
    eps: float,
    alpha: float,
    Y: Sequence[Config] | None = None,
    budget_cells: int = DEFAULT_BUDGET_CELLS,
    s_max: float | None = None,
    dist_tol: float = 1e-8,
    gap_tol: float = 1e-10,
) -> RDResult:
    """R_{mu,infty}(eps, alpha, F): counting distortion (1/|F|)#{g: d >= eps} < alpha."""
    if not 0.0 < alpha <= 0.5:
        raise ValueError(f"alpha must lie in (0, 1/2], got {alpha}")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    mu = mu_marginal.restrict_support()
    xs = list(mu.outcomes)
    ys = list(Y) if Y is not None else xs
    if len(xs) * len(ys) > budget_cells:
        raise ValueError(
            f"joint size {len(xs)}x{len(ys)} exceeds budget of {budget_cells} cells"
        )
    rho = distortion_matrix(model, xs, ys, DistortionSpec("linf"), eps=eps)
    target = alpha * STRICT_FACTOR
    if s_max is None:
        s_max = 50.0 / alpha
    rate, dist, s, kernel, gap, iters, converged, note = minimize_rate(
        mu.probs, rho, target, s_max, dist_tol=dist_tol, gap_tol=gap_tol
    )
    return RDResult(
        eps=eps,
        rate=rate,
        multiplier=s,
        iterations=iters,
        distortion=dist,
        target=target,
        gap=gap,
        feasible=dist <= target,
        converged=converged,
        alpha=alpha,
        note=note,
        kernel=kernel,
        x_outcomes=tuple(xs),
        y_outcomes=tuple(ys),
    )


# ---------------------------------------------------------------------------
# Invariant-measure candidate models


class ProductMeasure:
    """I.i.d. product measure from a single-site pmf; exactly shift-consistent."""

    def __init__(self, site_probs: Sequence[float], name: str | None = None):
        p = np.asarray(site_probs, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("site probabilities must form a pmf")
        self.site = p
        self.name = name or "product"

    def window_marginal(self, model: SystemModel, F: FiniteSubset, eps: float | None = None) -> Pmf:
        idx = np.flatnonzero(self.site > 0)
        k = len(F)
        outcomes = list(itertools.product(idx.tolist(), repeat=k))
        arr = np.asarray(outcomes, dtype=np.intp)
        probs = self.site[arr].prod(axis=1)
        return Pmf(tuple(tuple(o) for o in outcomes), probs)


class MarkovMeasure:
    """Stationary Markov chain marginals on interval windows of Z."""

    def __init__(self, transition: np.ndarray, stationary: np.ndarray, name: str | None = None):
        P = np.asarray(transition, dtype=float)
        pi = np.asarray(stationary, dtype=float)
        if np.any(P < 0) or np.max(np.abs(P.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("transition rows must be pmfs")
        if np.any(pi < 0) or abs(pi.sum() - 1.0) > 1e-12:
            raise ValueError("stationary vector must be a pmf")
        if np.max(np.abs(pi @ P - pi)) > 1e-10:
            raise ValueError("stationary vector is not invariant under the transition")
        self.P = P
        self.pi = pi
        self.name = name or "markov"

    def window_marginal(self, model: SystemModel, F: FiniteSubset, eps: float | None = None) -> Pmf:
        coords = sorted(F.elements)
        vals = [c[0] for c in coords]
        if model.group.dim != 1 or vals != list(range(vals[0], vals[0] + len(vals))):
            raise ValueError("Markov marginals require an interval window of Z")
        k = len(vals)
        na = len(self.pi)
        outcomes = list(itertools.product(range(na), repeat=k))
        arr = np.asarray(outcomes, dtype=np.intp)
        probs = self.pi[arr[:, 0]].copy()
        for i in range(k - 1):
            probs *= self.P[arr[:, i], arr[:, i + 1]]
        keep = probs > 0
        return Pmf(tuple(tuple(o) for o, kp in zip(outcomes, keep) if kp), probs[keep])


class EmpiricalMeasure:
    """Shift-averaged empirical measure mu_n built from a finite configuration set."""

    def __init__(self, atoms: dict[Config, float], window: FiniteSubset, name: str = "empirical"):
        total = sum(atoms.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"atom weights sum to {total}, not 1")
        self.atoms = dict(atoms)
        self.window = window
        self.name = name

    def window_marginal(self, model: SystemModel, F: FiniteSubset, eps: float | None = None) -> Pmf:
        w_coords = sorted(self.window.elements)
        f_coords = sorted(F.elements)
        pos = {c: i for i, c in enumerate(w_coords)}
        try:
            sel = [pos[c] for c in f_coords]
        except KeyError as exc:
            raise ValueError("marginal window must sit inside the empirical window") from exc
        acc: dict[Config, float] = {}
        for cfg, w in self.atoms.items():
            proj = tuple(cfg[i] for i in sel)
            acc[proj] = acc.get(proj, 0.0) + w
        outcomes = tuple(sorted(acc))
        return Pmf(outcomes, np.array([acc[o] for o in outcomes]))


def empirical_measure(S: Sequence[Config], window: FiniteSubset, model: SystemModel) -> EmpiricalMeasure:
    """The measure mu_n: uniform weights on S pushed through every window shift.

    nu_n is uniform over S; each g in the window acts by the periodic right
    shift and the results are averaged, so marginals on sub-windows are exact
    finite sums.
    """
    S = list(S)
    if not S:
        raise ValueError("empirical measure needs a nonempty configuration set")
    shifts = sorted(window.elements)
    w = 1.0 / (len(S) * len(shifts))
    atoms: dict[Config, float] = {}
    for g in shifts:
        for x in S:
            y = model.shift(x, g, window)
            atoms[y] = atoms.get(y, 0.0) + w
    return EmpiricalMeasure(atoms, window)


@dataclass(frozen=True)
class Quantizer:
    """Partition of the alphabet into diameter-<eps cells with representatives."""

    eps: float
    cells: tuple[tuple[int, ...], ...]
    reps: tuple[int, ...]
    cell_of: tuple[int, ...]

    def quantize_config(self, x: Config) -> Config:
        return tuple(self.reps[self.cell_of[i]] for i in x)

    def rep_configs(self, window_size: int) -> list[Config]:
        return [tuple(c) for c in itertools.product(sorted(set(self.reps)), repeat=window_size)]


def partition_map(model: SystemModel, eps: float) -> Quantizer:
    """Greedy partition of the alphabet into cells of diameter < eps.

    Symbols are scanned in value order; a cell closes as soon as adding the
    next symbol would push its diameter to eps or beyond.  Idempotent by
    construction: every representative maps to its own cell.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    order = sorted(range(len(model.alphabet)), key=lambda i: (model.alphabet[i], i))
    cells: list[list[int]] = []
    current: list[int] = []
    for i in order:
        if current and any(model.metric[i, j] >= eps for j in current):
            cells.append(current)
            current = [i]
        else:
            current.append(i)
    if current:
        cells.append(current)
    reps = tuple(cell[len(cell) // 2] for cell in cells)
    cell_of = [0] * len(model.alphabet)
    for ci, cell in enumerate(cells):
        for i in cell:
            cell_of[i] = ci
    return Quantizer(eps=eps, cells=tuple(tuple(c) for c in cells), reps=reps, cell_of=tuple(cell_of))


def default_codebook(model: SystemModel, mu: Pmf, eps: float, window_size: int) -> list[Config]:
    """Support of mu plus the quantizer lattice at mesh eps, deduplicated."""
    quant = partition_map(model, eps)
    seen = set(mu.restrict_support().outcomes)
    out = sorted(seen | set(quant.rep_configs(window_size)))
    return out


# ---------------------------------------------------------------------------
# Normalized rates along a Folner sequence


@dataclass(frozen=True)
class NormalizedRates:
    rows: tuple[dict, ...]
    truncated_at: int | None


def rd_normalized(
    measure,
    model: SystemModel,
    spec: DistortionSpec,
    folner: FolnerSequence,
    n_range: Iterable[int],
    eps: float,
    alpha: float | None = None,
    budget_cells: int = DEFAULT_BUDGET_CELLS,
    use_quantizer_codebook: bool = True,
) -> NormalizedRates:
    """Per-window normalized rates R(eps, F_n)/|F_n| along a Folner sequence.

    Windows whose joint size would exceed the cell budget are skipped and the
    truncation point reported.
    """
    rows: list[dict] = []
    truncated_at: int | None = None
    for n in n_range:
        F = folner(n)
        mu = measure.window_marginal(model, F, eps)
        mu = mu.restrict_support()
        ys = (
            default_codebook(model, mu, eps, len(F))
            if use_quantizer_codebook
            else list(mu.outcomes)
        )
        if len(mu.outcomes) * len(ys) > budget_cells:
            truncated_at = n
            break
        if spec.kind == "linf":
            if alpha is None:
                raise ValueError("linf distortion needs alpha")
            res = rd_window_linf(mu, model, eps, alpha, Y=ys, budget_cells=budget_cells)
        else:
            res = rd_window(mu, model, spec, eps, Y=ys, budget_cells=budget_cells)
        rows.append(
            {
                "n": n,
                "window_size": len(F),
                "eps": eps,
                "alpha": alpha,
                "measure": measure.name,
                "rate": res.rate,
                "rate_per_symbol": res.rate / len(F),
                "distortion": res.distortion,
                "multiplier": res.multiplier,
                "gap": res.gap,
                "feasible": res.feasible,
                "converged": res.converged,
            }
        )
    return NormalizedRates(rows=tuple(rows), truncated_at=truncated_at)


def linf_alpha_path(
    measure,
    model: SystemModel,
    folner: FolnerSequence,
    n: int,
    eps: float,
    alphas: Sequence[float],
    budget_cells: int = DEFAULT_BUDGET_CELLS,
) -> list[dict]:
    """R_{mu,infty}(eps, alpha, F_n) along a decreasing alpha grid."""
    F = folner(n)
    mu = measure.window_marginal(model, F, eps).restrict_support()
    ys = default_codebook(model, mu, eps, len(F))
    rows = []
    for alpha in alphas:
        res = rd_window_linf(mu, model, eps, alpha, Y=ys, budget_cells=budget_cells)
        rows.append(
            {
                "n": n,
                "eps": eps,
                "alpha": alpha,
                "measure": measure.name,
                "rate": res.rate,
                "rate_per_symbol": res.rate / len(F),
                "distortion": res.distortion,
                "feasible": res.feasible,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Measure families for the sup over invariant measures


def product_family(model: SystemModel, simplex_steps: int = 4) -> list[ProductMeasure]:
    """Product measures on a simplex grid (small alphabets) or fixed tilts."""
    na = len(model.alphabet)
    out: list[ProductMeasure] = []
    if na <= 3:
        denom = simplex_steps
        for comp in itertools.product(range(denom + 1), repeat=na - 1):
            if sum(comp) <= denom:
                probs = [c / denom for c in comp] + [1.0 - sum(comp) / denom]
                if all(p > 0 for p in probs):
                    tag = "-".join(f"{c}" for c in comp)
                    out.append(ProductMeasure(probs, name=f"product[{tag}/{denom}]"))
    else:
        out.append(ProductMeasure(np.full(na, 1.0 / na), name="product[uniform]"))
        ramp = np.arange(1, na + 1, dtype=float)
        out.append(ProductMeasure(ramp / ramp.sum(), name="product[ramp-up]"))
        out.append(ProductMeasure(ramp[::-1] / ramp.sum(), name="product[ramp-down]"))
    return out


def markov_family(model: SystemModel) -> list[MarkovMeasure]:
    """Stock Markov candidates (binary alphabets over Z only)."""
    if model.group.dim != 1 or len(model.alphabet) != 2:
        return []
    sticky = np.array([[0.9, 0.1], [0.1, 0.9]])
    swap = np.array([[0.2, 0.8], [0.8, 0.2]])
    uniform = np.array([0.5, 0.5])
    return [
        MarkovMeasure(sticky, uniform, name="markov[sticky0.9]"),
        MarkovMeasure(swap, uniform, name="markov[swap0.8]"),
    ]


class EmpiricalFamily:
    """Per-window empirical measures from maximal separated sets.

    The separation radius is ``sep_factor * eps`` under the chosen orbit
    metric; the greedy separated set is maximal, mirroring the measure
    construction used in the sup-over-measures direction.
    """

    def __init__(self, sep_factor: float = 2.0, metric_kind: str = "avg", name: str | None = None):
        self.sep_factor = sep_factor
        self.metric_kind = metric_kind
        self.name = name or f"empirical[{metric_kind},{sep_factor}eps]"

    def window_marginal(self, model: SystemModel, F: FiniteSubset, eps: float) -> Pmf:
        m = model.orbit_metric(self.metric_kind, F)  # type: ignore[arg-type]
        pts = list(model.configurations(F))
        S = separated_set(pts, m, self.sep_factor * eps)
        measure = empirical_measure(S, F, model)
        return measure.window_marginal(model, F)


# ---------------------------------------------------------------------------
# Ordering checks from the Hoelder / diameter-bound proof chain


def ordering_suite(
    model: SystemModel,
    measure,
    F: FiniteSubset,
    eps: float,
    ps: Sequence[float] = (1, 2, 4),
    alphas: Sequence[float] = (0.1, 0.01),
    slack: float = 1e-6,
    budget_cells: int = DEFAULT_BUDGET_CELLS,
) -> list[dict]:
    """Pairwise rate orderings on one window, with a shared codebook.

    Checks R_1(eps) <= R_p(eps) for each p, and
    R_1(eps + alpha*diam + 1e-6) <= R_inf(eps, alpha) for each alpha.
    """
    mu = measure.window_marginal(model, F, eps).restrict_support()
    ys = default_codebook(model, mu, eps, len(F))
    rows: list[dict] = []
    r1 = rd_window(mu, model, DistortionSpec("l1"), eps, Y=ys, budget_cells=budget_cells)
    for p in ps:
        spec = DistortionSpec("l1") if p == 1 else DistortionSpec("lp", p=float(p))
        rp = rd_window(mu, model, spec, eps, Y=ys, budget_cells=budget_cells)
        rows.append(
            {
                "check": f"l1<=l{p}",
                "eps": eps,
                "measure": measure.name,
                "lhs": r1.rate,
                "rhs": rp.rate,
                "ok": r1.rate <= rp.rate + slack,
            }
        )
    for alpha in alphas:
        rinf = rd_window_linf(mu, model, eps, alpha, Y=ys, budget_cells=budget_cells)
        eps_prime = eps + alpha * model.diam + 1e-6
        r1p = rd_window(mu, model, DistortionSpec("l1"), eps_prime, Y=ys, budget_cells=budget_cells)
        rows.append(
            {
                "check": f"l1(eps+{alpha}*diam)<=linf(alpha={alpha})",
                "eps": eps,
                "measure": measure.name,
                "lhs": r1p.rate,
                "rhs": rinf.rate,
                "ok": r1p.rate <= rinf.rate + slack,
            }
        )
    return rows
