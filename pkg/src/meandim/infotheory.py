"""Exact entropy and mutual information on finite distributions.

All logarithms are natural (nats); conversion to bits belongs to display
code.  On finite spaces the sup-over-partitions definition of mutual
information is attained by the point partition, so the discrete formulas
below are exact.  Convention: 0 log 0 = 0 throughout.

Numerical slack: 1e-12 for normalization checks, 1e-9 for inequalities
(double precision accumulated over at most ~1e6 terms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

NORM_TOL = 1e-12
INEQ_SLACK = 1e-9


def _probs(p) -> np.ndarray:
    if isinstance(p, Pmf):
        return p.probs
    if isinstance(p, JointPmf):
        return p.matrix
    return np.asarray(p, dtype=float)


@dataclass(frozen=True)
class Pmf:
    """Probability mass function over an explicit finite support."""

    outcomes: tuple
    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", p)
        if len(self.outcomes) != p.shape[0] or p.ndim != 1:
            raise ValueError("outcomes and probs must align")
        if np.any(p < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"probabilities sum to {p.sum()}, not 1")

    @staticmethod
    def point_mass(outcomes: Sequence, index: int) -> "Pmf":
        p = np.zeros(len(outcomes))
        p[index] = 1.0
        return Pmf(tuple(outcomes), p)

    @staticmethod
    def uniform(outcomes: Sequence) -> "Pmf":
        n = len(outcomes)
        return Pmf(tuple(outcomes), np.full(n, 1.0 / n))

    def restrict_support(self) -> "Pmf":
        """Drop zero-probability outcomes."""
        keep = self.probs > 0
        return Pmf(tuple(o for o, k in zip(self.outcomes, keep) if k), self.probs[keep])


@dataclass(frozen=True)
class JointPmf:
    """Joint distribution on a product of two explicit finite supports."""

    x_outcomes: tuple
    y_outcomes: tuple
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.shape != (len(self.x_outcomes), len(self.y_outcomes)):
            raise ValueError("matrix shape must match outcome lists")
        if np.any(m < 0):
            raise ValueError("joint probabilities must be nonnegative")
        if abs(m.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"joint sums to {m.sum()}, not 1")

    def marginal_x(self) -> Pmf:
        return Pmf(self.x_outcomes, self.matrix.sum(axis=1))

    def marginal_y(self) -> Pmf:
        return Pmf(self.y_outcomes, self.matrix.sum(axis=0))

    @staticmethod
    def from_kernel(mu: Pmf, kernel: np.ndarray, y_outcomes: Sequence) -> "JointPmf":
        """Joint mu(x) * kernel(y|x); kernel rows are conditional pmfs."""
        k = np.asarray(kernel, dtype=float)
        return JointPmf(mu.outcomes, tuple(y_outcomes), mu.probs[:, None] * k)


def joint_to_json(j: JointPmf) -> dict:
    return {
        "x_outcomes": [list(o) if isinstance(o, tuple) else o for o in j.x_outcomes],
        "y_outcomes": [list(o) if isinstance(o, tuple) else o for o in j.y_outcomes],
        "matrix": j.matrix.tolist(),
    }


def joint_from_json(data: dict) -> JointPmf:
    def fix(o):
        return tuple(o) if isinstance(o, list) else o

    return JointPmf(
        tuple(fix(o) for o in data["x_outcomes"]),
        tuple(fix(o) for o in data["y_outcomes"]),
        np.asarray(data["matrix"], dtype=float),
    )


def entropy(p) -> float:
    """Shannon entropy -sum p log p in nats, with 0 log 0 = 0."""
    q = _probs(p).ravel()
    nz = q[q > 0]
    return float(-(nz * np.log(nz)).sum())


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary entropy needs p in [0,1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


def mutual_information(joint) -> float:
    """I(X;Y) = sum p(x,y) log [ p(x,y) / (p(x) p(y)) ] over the point partition."""
    m = _probs(joint)
    px = m.sum(axis=1)
    py = m.sum(axis=0)
    mask = m > 0
    # log p - log px - log py keeps tiny marginal products from underflowing
    logs = np.log(m[mask]) - np.log(np.broadcast_to(px[:, None], m.shape)[mask])
    logs -= np.log(np.broadcast_to(py[None, :], m.shape)[mask])
    return float((m[mask] * logs).sum())


def conditional_entropy(joint) -> float:
    """H(X|Y) for a joint on X x Y."""
    m = _probs(joint)
    return entropy(m) - entropy(m.sum(axis=0))


def mi_from_kernel(mu, kernel) -> float:
    """I(mu, nu) for an input pmf mu and a channel kernel nu(y|x)."""
    mu = _probs(mu)
    k = np.asarray(kernel, dtype=float)
    return mutual_information(mu[:, None] * k)


def check_data_processing(joint: JointPmf, f: Callable | Sequence[int]) -> bool:
    """Whether I(X; f(Y)) <= I(X;Y) holds within slack for the given map on Y."""
    m = joint.matrix
    ny = m.shape[1]
    if callable(f):
        images = [f(y) for y in joint.y_outcomes]
    else:
        images = list(f)
        if len(images) != ny:
            raise ValueError("index map must cover every Y outcome")
    targets = sorted(set(images), key=lambda z: str(z))
    col = {z: i for i, z in enumerate(targets)}
    pushed = np.zeros((m.shape[0], len(targets)))
    for y_idx, z in enumerate(images):
        pushed[:, col[z]] += m[:, y_idx]
    return mutual_information(pushed) <= mutual_information(m) + INEQ_SLACK


@dataclass(frozen=True)
class SubSuperResult:
    sub_applicable: bool
    sub_ok: bool
    super_applicable: bool
    super_ok: bool


def check_sub_super_additivity(p_xyz: np.ndarray) -> SubSuperResult:
    """Test I(Y; X,Z) against I(Y;X) + I(Y;Z) under the paper's applicability flags.

    Subadditivity applies when X and Z are conditionally independent given Y;
    superadditivity when X and Z are independent.  Applicability is decided
    within 1e-12, the inequality within 1e-9.
    """
    p = np.asarray(p_xyz, dtype=float)
    if p.ndim != 3:
        raise ValueError("a full joint on X x Y x Z is required")
    nx, ny, nz = p.shape
    p_y = p.sum(axis=(0, 2))
    p_xy = p.sum(axis=2)  # (x, y)
    p_yz = p.sum(axis=0)  # (y, z)

    sub_applicable = True
    for y in range(ny):
        if p_y[y] <= 0:
            continue
        cond_xz = p[:, y, :] / p_y[y]
        cond_x = p_xy[:, y] / p_y[y]
        cond_z = p_yz[y, :] / p_y[y]
        if np.max(np.abs(cond_xz - np.outer(cond_x, cond_z))) > NORM_TOL:
            sub_applicable = False
            break

    p_xz = p.sum(axis=1)
    px = p_xz.sum(axis=1)
    pz = p_xz.sum(axis=0)
    super_applicable = bool(np.max(np.abs(p_xz - np.outer(px, pz))) <= NORM_TOL)

    # I(Y; (X,Z)) from the joint on Y x (X,Z)
    i_y_xz = mutual_information(np.transpose(p, (1, 0, 2)).reshape(ny, nx * nz))
    i_y_x = mutual_information(p_xy.T)
    i_y_z = mutual_information(p_yz)

    sub_ok = (not sub_applicable) or (i_y_xz <= i_y_x + i_y_z + INEQ_SLACK)
    super_ok = (not super_applicable) or (i_y_xz >= i_y_x + i_y_z - INEQ_SLACK)
    return SubSuperResult(sub_applicable, sub_ok, super_applicable, super_ok)


def fano_bound(eps: float, D: float, S_size: int) -> float:
    """Lower bound (1 - 1/D) log|S| - H(1/D) on I(X;Y).

    Valid when X is uniform on a 2*D*eps-separated set S and E d(X,Y) < eps;
    eps enters only through those preconditions, not the value.
    """
    if D <= 2:
        raise ValueError(f"the bound requires D > 2, got {D}")
    if S_size < 1:
        raise ValueError(f"|S| must be >= 1, got {S_size}")
    return (1.0 - 1.0 / D) * math.log(S_size) - binary_entropy(1.0 / D)


def fano_bound_linf(S_size: int, F_size: int, alpha: float, A_size: int) -> float:
    """Lower bound log|S| - |F| H(alpha) - alpha |F| log|A| for the counting distortion."""
    if not 0.0 <= alpha <= 0.5:
        raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")
    if S_size < 1 or F_size < 1 or A_size < 1:
        raise ValueError("sizes must be positive")
    return math.log(S_size) - F_size * binary_entropy(alpha) - alpha * F_size * math.log(A_size)


def mi_concave_in_source(
    mu1, mu2, kernel, t_grid: Sequence[float], slack: float = INEQ_SLACK
) -> bool:
    """I((1-t) mu1 + t mu2, nu) >= (1-t) I(mu1, nu) + t I(mu2, nu) over a t-grid."""
    mu1, mu2 = _probs(mu1), _probs(mu2)
    i1 = mi_from_kernel(mu1, kernel)
    i2 = mi_from_kernel(mu2, kernel)
    for t in t_grid:
        mix = mi_from_kernel((1 - t) * mu1 + t * mu2, kernel)
        if mix < (1 - t) * i1 + t * i2 - slack:
            return False
    return True


def mi_convex_in_channel(
    mu, kernel1, kernel2, t_grid: Sequence[float], slack: float = INEQ_SLACK
) -> bool:
    """I(mu, (1-t) nu1 + t nu2) <= (1-t) I(mu, nu1) + t I(mu, nu2) over a t-grid."""
    k1 = np.asarray(kernel1, dtype=float)
    k2 = np.asarray(kernel2, dtype=float)
    i1 = mi_from_kernel(mu, k1)
    i2 = mi_from_kernel(mu, k2)
    for t in t_grid:
        mix = mi_from_kernel(mu, (1 - t) * k1 + t * k2)
        if mix > (1 - t) * i1 + t * i2 + slack:
            return False
    return True


def check_concavity_convexity(
    mu1, mu2, kernel1, kernel2=None, t_grid: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0)
) -> bool:
    """Both directions at once: concave in the source (kernel1 fixed), and,
    when kernel2 is given, convex in the channel (for the source mu1)."""
    ok = mi_concave_in_source(mu1, mu2, kernel1, t_grid)
    if kernel2 is not None:
        ok = ok and mi_convex_in_channel(mu1, kernel1, kernel2, t_grid)
    return ok


def fano_inequality_holds(joint: JointPmf) -> bool:
    """Prop-style Fano check with the argmax decoder: H(X|Y) <= H(Pe) + Pe log|X|."""
    m = joint.matrix
    nx = m.shape[0]
    decoder = m.argmax(axis=0)  # f(y) = most likely x
    p_correct = sum(m[decoder[y], y] for y in range(m.shape[1]))
    pe = 1.0 - float(p_correct)
    pe = min(max(pe, 0.0), 1.0)
    return conditional_entropy(m) <= binary_entropy(pe) + pe * math.log(nx) + INEQ_SLACK


def mi_continuity_gap(joint: JointPmf, perturbation: np.ndarray) -> float:
    """|I(perturbed) - I(joint)| for a signed perturbation with zero total mass."""
    pert = np.asarray(perturbation, dtype=float)
    m = joint.matrix + pert
    if np.any(m < 0) or abs(m.sum() - 1.0) > NORM_TOL:
        raise ValueError("perturbed matrix is not a joint pmf")
    return abs(mutual_information(m) - mutual_information(joint.matrix))


@dataclass(frozen=True)
class FanoCheck:
    applicable: bool
    holds: bool
    i_value: float
    bound: float
    reasons: tuple[str, ...]


def empirical_fano_check(joint: JointPmf, metric, eps: float, D: float) -> FanoCheck:
    """Verify Lemma-style preconditions on a concrete coupling, then the bound.

    Preconditions: the X marginal is uniform over its support S, S is
    2*D*eps-separated under ``metric`` (an OrbitMetric over configurations),
    and E d(X,Y) < eps.  When any fails the check is not applicable and no
    assertion is made.
    """
    reasons = []
    px = joint.marginal_x().probs
    support = px > 0
    s_size = int(support.sum())
    if np.max(np.abs(px[support] - 1.0 / s_size)) > NORM_TOL:
        reasons.append("X marginal is not uniform on its support")
    s_points = [joint.x_outcomes[i] for i in np.flatnonzero(support)]
    sep = 2.0 * D * eps
    for i in range(len(s_points)):
        for j in range(i + 1, len(s_points)):
            if metric.dist(s_points[i], s_points[j]) < sep:
                reasons.append(f"support pair ({i},{j}) closer than 2*D*eps")
                break
        else:
            continue
        break
    expected = 0.0
    for xi, x in enumerate(joint.x_outcomes):
        row = joint.matrix[xi]
        for yi, y in enumerate(joint.y_outcomes):
            if row[yi] > 0:
                expected += row[yi] * metric.dist(x, y)
    if expected >= eps:
        reasons.append(f"E d(X,Y) = {expected} is not < eps")
    if reasons:
        return FanoCheck(False, True, math.nan, math.nan, tuple(reasons))
    i_val = mutual_information(joint.matrix)
    bound = fano_bound(eps, D, s_size)
    return FanoCheck(True, i_val >= bound - INEQ_SLACK, i_val, bound, ())


# ---------------------------------------------------------------------------
# Randomized property suite


@dataclass
class PropertySuiteResult:
    trials: int
    seed: int
    failures: dict = field(default_factory=dict)
    elapsed_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(v == 0 for v in self.failures.values())

    def as_json(self) -> dict:
        return {
            "suite": "infotheory-properties",
            "trials": self.trials,
            "seed": self.seed,
            "elapsed_seconds": self.elapsed_seconds,
            "tests": [
                {"name": name, "failures": count, "passed": count == 0}
                for name, count in sorted(self.failures.items())
            ],
        }


def _random_joint(rng: np.random.Generator, nx: int, ny: int) -> np.ndarray:
    m = rng.random((nx, ny)) ** 2
    # sparsify some entries to exercise 0 log 0 handling
    m[rng.random((nx, ny)) < 0.2] = 0.0
    if m.sum() == 0:
        m[0, 0] = 1.0
    return m / m.sum()


def property_suite(trials: int = 10_000, seed: int = 0, max_support: int = 6) -> PropertySuiteResult:
    """Randomized check of the basic mutual-information properties.

    Each trial draws supports of size up to ``max_support`` and checks, within
    1e-9: nonnegativity, symmetry, the entropy identity, data processing,
    Fano with the argmax decoder, sub/superadditivity on constructed
    applicable triples, and concavity/convexity of I.
    """
    import time

    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    failures = {
        "nonnegativity": 0,
        "symmetry": 0,
        "entropy_identity": 0,
        "data_processing": 0,
        "fano": 0,
        "subadditivity": 0,
        "superadditivity": 0,
        "concavity_in_source": 0,
        "convexity_in_channel": 0,
    }
    t_grid = (0.0, 0.25, 0.5, 1.0)
    for _ in range(trials):
        nx = int(rng.integers(2, max_support + 1))
        ny = int(rng.integers(2, max_support + 1))
        nz = int(rng.integers(2, max_support + 1))
        m = _random_joint(rng, nx, ny)

        i_xy = mutual_information(m)
        if i_xy < -INEQ_SLACK:
            failures["nonnegativity"] += 1
        if abs(i_xy - mutual_information(m.T)) > INEQ_SLACK:
            failures["symmetry"] += 1
        ident = entropy(m.sum(axis=1)) + entropy(m.sum(axis=0)) - entropy(m)
        if abs(i_xy - ident) > INEQ_SLACK:
            failures["entropy_identity"] += 1

        f = rng.integers(0, max(1, ny - 1), size=ny)
        joint = JointPmf(tuple(range(nx)), tuple(range(ny)), m)
        if not check_data_processing(joint, [int(v) for v in f]):
            failures["data_processing"] += 1
        if not fano_inequality_holds(joint):
            failures["fano"] += 1

        # Markov triple X - Y - Z: conditionally independent by construction
        py = _random_joint(rng, ny, 1).ravel()
        kx = _random_kernel(rng, ny, nx)
        kz = _random_kernel(rng, ny, nz)
        p_xyz = py[None, :, None] * kx.T[:, :, None] * kz[None, :, :]
        res = check_sub_super_additivity(p_xyz)
        if not (res.sub_applicable and res.sub_ok):
            failures["subadditivity"] += 1

        # independent X, Z with Y = deterministic function of the pair
        px = _random_joint(rng, nx, 1).ravel()
        pz = _random_joint(rng, nz, 1).ravel()
        labels = rng.integers(0, ny, size=(nx, nz))
        p2 = np.zeros((nx, ny, nz))
        for a in range(nx):
            for c in range(nz):
                p2[a, labels[a, c], c] = px[a] * pz[c]
        res2 = check_sub_super_additivity(p2)
        if not (res2.super_applicable and res2.super_ok):
            failures["superadditivity"] += 1

        mu1 = _random_joint(rng, nx, 1).ravel()
        mu2 = _random_joint(rng, nx, 1).ravel()
        k1 = _random_kernel(rng, nx, ny)
        k2 = _random_kernel(rng, nx, ny)
        if not mi_concave_in_source(mu1, mu2, k1, t_grid):
            failures["concavity_in_source"] += 1
        if not mi_convex_in_channel(mu1, k1, k2, t_grid):
            failures["convexity_in_channel"] += 1

    return PropertySuiteResult(
        trials=trials,
        seed=seed,
        failures=failures,
        elapsed_seconds=time.perf_counter() - start,
    )


def _random_kernel(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    k = rng.random((rows, cols)) ** 2
    k[k.sum(axis=1) == 0, 0] = 1.0
    return k / k.sum(axis=1, keepdims=True)
