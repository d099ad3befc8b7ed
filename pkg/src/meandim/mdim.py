"""Covering-growth profiles, metric mean dimension slopes, and the
variational-principle comparison report.

Everything here is desk scale: limits over n and eps are replaced by finite
windows and grids, so the report separates EXACT one-sided inequalities
(quantizer direction, metric ordering, monotonicity) from TREND diagnostics
(slope ratios), and never asserts the limiting equalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .groups import FiniteSubset, FolnerSequence
from .infotheory import Pmf, binary_entropy, fano_bound, mutual_information
from .ratedist import (
    DEFAULT_BUDGET_CELLS,
    DistortionSpec,
    default_codebook,
    partition_map,
    rd_window,
    rd_window_linf,
)
from .spaces import EXACT_COVER_MAX, OrbitMetric, SystemModel, covering_number, separated_set

DEFAULT_BUDGET_CONFIGS = 10_000


@dataclass(frozen=True)
class SRow:
    eps: float
    n: int
    window_size: int
    n_points: int
    lower: int
    upper: int
    exact: bool

    @property
    def norm_lower(self) -> float:
        return math.log(self.lower) / self.window_size if self.lower > 0 else 0.0

    @property
    def norm_upper(self) -> float:
        return math.log(self.upper) / self.window_size if self.upper > 0 else 0.0


@dataclass
class MdimEstimate:
    metric_kind: str
    eps_grid: tuple[float, ...]
    n_range: tuple[int, ...]
    rows: list[SRow] = field(default_factory=list)
    truncated_at: int | None = None

    def row(self, eps: float, n: int) -> SRow:
        for r in self.rows:
            if r.eps == eps and r.n == n:
                return r
        raise KeyError(f"no profile row for eps={eps}, n={n}")

    def largest_n(self) -> int:
        return max(r.n for r in self.rows)

    def as_json(self) -> dict:
        return {
            "metric_kind": self.metric_kind,
            "eps_grid": list(self.eps_grid),
            "n_range": list(self.n_range),
            "truncated_at": self.truncated_at,
            "rows": [
                {
                    "eps": r.eps,
                    "n": r.n,
                    "window_size": r.window_size,
                    "n_points": r.n_points,
                    "lower": r.lower,
                    "upper": r.upper,
                    "exact": r.exact,
                    "norm_lower": r.norm_lower,
                    "norm_upper": r.norm_upper,
                }
                for r in self.rows
            ],
        }


def s_profile(
    model: SystemModel,
    folner: FolnerSequence,
    eps_grid: Sequence[float],
    n_range: Sequence[int],
    metric_kind: str = "max",
    budget_configs: int = DEFAULT_BUDGET_CONFIGS,
) -> MdimEstimate:
    """Normalized log covering-number brackets (1/|F_n|) log #(A^{F_n}, d, eps).

    The point set for each window is the full configuration space A^{F_n};
    windows beyond the configuration budget are skipped and reported.
    """
    est = MdimEstimate(
        metric_kind=metric_kind, eps_grid=tuple(eps_grid), n_range=tuple(n_range)
    )
    for n in n_range:
        F = folner(n)
        if model.n_configs(F) > budget_configs:
            est.truncated_at = n
            break
        pts = list(model.configurations(F))
        metric = model.orbit_metric(metric_kind, F)  # type: ignore[arg-type]
        for eps in eps_grid:
            lower, upper = covering_number(pts, metric, eps)
            est.rows.append(
                SRow(
                    eps=eps,
                    n=n,
                    window_size=len(F),
                    n_points=len(pts),
                    lower=lower,
                    upper=upper,
                    exact=len(pts) <= EXACT_COVER_MAX,
                )
            )
    return est


@dataclass(frozen=True)
class SlopeReport:
    upper_slope: float
    lower_slope: float
    regression_slope: float
    ratios: tuple[dict, ...]


def mdim_slopes(est: MdimEstimate, tail_points: int | None = None) -> SlopeReport:
    """Tail statistics of S(eps)/|log eps| plus a least-squares stability slope.

    Uses the upper bracket at each grid point's largest computed window; the
    extrapolation to eps -> 0 is the reader's, not the toolkit's.
    """
    eps_values = sorted({r.eps for r in est.rows}, reverse=True)
    if len(eps_values) < 3:
        raise ValueError("slope estimates require at least 3 eps grid points")
    if any(e <= 0 or e >= 1 for e in eps_values):
        raise ValueError("slope ratios require eps in (0, 1)")
    n_star = est.largest_n()
    ratios = []
    for eps in eps_values:
        row = est.row(eps, n_star)
        ratios.append(
            {
                "eps": eps,
                "n": n_star,
                "s_upper": row.norm_upper,
                "s_lower": row.norm_lower,
                "ratio_upper": row.norm_upper / abs(math.log(eps)),
                "ratio_lower": row.norm_lower / abs(math.log(eps)),
            }
        )
    k = tail_points if tail_points is not None else max(2, len(eps_values) // 2)
    tail = ratios[-k:]  # smallest eps values
    xs = np.array([abs(math.log(r["eps"])) for r in ratios])
    ys = np.array([r["s_upper"] for r in ratios])
    slope = float(np.polyfit(xs, ys, 1)[0])
    return SlopeReport(
        upper_slope=max(r["ratio_upper"] for r in tail),
        lower_slope=min(r["ratio_upper"] for r in tail),
        regression_slope=slope,
        ratios=tuple(ratios),
    )


# ---------------------------------------------------------------------------
# Variational-principle comparison report


@dataclass
class VPReport:
    mode: str
    model_name: str
    checks: list[dict] = field(default_factory=list)
    rate_rows: list[dict] = field(default_factory=list)
    ratio_rows: list[dict] = field(default_factory=list)
    profile_max: MdimEstimate | None = None
    profile_avg: MdimEstimate | None = None
    finest_eps_ratio_gap: float | None = None

    @property
    def exact_ok(self) -> bool:
        return all(c["ok"] for c in self.checks if c["kind"] == "exact")

    def as_json(self) -> dict:
        return {
            "mode": self.mode,
            "model": self.model_name,
            "exact_ok": self.exact_ok,
            "finest_eps_ratio_gap": self.finest_eps_ratio_gap,
            "checks": self.checks,
            "rates": self.rate_rows,
            "ratios": self.ratio_rows,
            "profile_max": self.profile_max.as_json() if self.profile_max else None,
            "profile_avg": self.profile_avg.as_json() if self.profile_avg else None,
        }


def verify_vp(
    model: SystemModel,
    folner: FolnerSequence,
    eps_grid: Sequence[float],
    n_range: Sequence[int],
    families: Sequence,
    mode: str = "l1",
    p: float = 2.0,
    alpha: float = 0.1,
    slack: float = 1e-6,
    budget_cells: int = DEFAULT_BUDGET_CELLS,
    budget_configs: int = DEFAULT_BUDGET_CONFIGS,
    model_name: str = "model",
    prop31_delta: float = 0.5,
) -> VPReport:
    """Compare sup-over-family rates against covering brackets, per (eps, n).

    Exact one-sided checks (quantizer direction): the normalized rate of every
    family is at most the normalized log upper covering bound, under the
    average metric for l1 and under the max metric for lp / linf.  Metric
    ordering and monotonicity are also asserted exactly.  The variational
    lower-bound direction appears only as slope-ratio trend rows.
    """
    if mode not in ("l1", "lp", "linf"):
        raise ValueError(f"unknown mode {mode!r}")
    report = VPReport(mode=mode, model_name=model_name)
    eps_sorted = sorted(eps_grid, reverse=True)
    report.profile_max = s_profile(model, folner, eps_sorted, n_range, "max", budget_configs)
    report.profile_avg = s_profile(model, folner, eps_sorted, n_range, "avg", budget_configs)

    computed_n = sorted({r.n for r in report.profile_max.rows})
    for n in computed_n:
        F = folner(n)
        for eps in eps_sorted:
            row_max = report.profile_max.row(eps, n)
            row_avg = report.profile_avg.row(eps, n)
            # metric ordering: a d-cover is a dbar-cover, so #_avg <= #_max
            lhs = row_avg.lower if not row_avg.exact else row_avg.upper
            report.checks.append(
                {
                    "check": "stilde<=s",
                    "kind": "exact",
                    "eps": eps,
                    "n": n,
                    "family": None,
                    "lhs": math.log(lhs) / len(F),
                    "rhs": row_max.norm_upper,
                    "ok": lhs <= row_max.upper,
                }
            )
            bound_row = row_avg if mode == "l1" else row_max
            bound = bound_row.norm_upper
            for fam in families:
                mu = fam.window_marginal(model, F, eps).restrict_support()
                ys = default_codebook(model, mu, eps, len(F))
                if len(mu.outcomes) * len(ys) > budget_cells:
                    continue
                if mode == "linf":
                    res = rd_window_linf(mu, model, eps, alpha, Y=ys, budget_cells=budget_cells)
                elif mode == "lp":
                    res = rd_window(
                        mu, model, DistortionSpec("lp", p=p), eps, Y=ys, budget_cells=budget_cells
                    )
                else:
                    res = rd_window(mu, model, DistortionSpec("l1"), eps, Y=ys, budget_cells=budget_cells)
                rate_norm = res.rate / len(F)
                report.rate_rows.append(
                    {
                        "eps": eps,
                        "n": n,
                        "alpha": alpha if mode == "linf" else None,
                        "family": fam.name,
                        "rate": res.rate,
                        "rate_per_symbol": rate_norm,
                        "distortion": res.distortion,
                        "feasible": res.feasible,
                        "converged": res.converged,
                        "gap": res.gap,
                    }
                )
                report.checks.append(
                    {
                        "check": f"rate<=cover[{'avg' if mode == 'l1' else 'max'}]",
                        "kind": "exact",
                        "eps": eps,
                        "n": n,
                        "family": fam.name,
                        "lhs": rate_norm,
                        "rhs": bound,
                        "ok": rate_norm <= bound + slack,
                    }
                )

    _append_monotonicity_checks(report, eps_sorted, computed_n)
    if mode == "l1":
        _append_prop31_checks(report, model, folner, eps_sorted, computed_n, prop31_delta)
    _append_ratio_rows(report, eps_sorted, computed_n)
    return report


def _append_monotonicity_checks(report: VPReport, eps_sorted, computed_n) -> None:
    for profile, tag in ((report.profile_max, "s"), (report.profile_avg, "stilde")):
        assert profile is not None
        for n in computed_n:
            for e_big, e_small in zip(eps_sorted, eps_sorted[1:]):
                hi = profile.row(e_small, n)
                lo = profile.row(e_big, n)
                report.checks.append(
                    {
                        "check": f"{tag}-monotone-in-eps",
                        "kind": "exact",
                        "eps": e_small,
                        "n": n,
                        "family": None,
                        "lhs": lo.norm_upper,
                        "rhs": hi.norm_upper,
                        "ok": lo.upper <= hi.upper and lo.lower <= hi.lower,
                    }
                )


def _append_prop31_checks(
    report: VPReport, model, folner, eps_sorted, computed_n, delta: float
) -> None:
    """Windowed form of the tame-growth comparison:
    (1/|F|) log #(X, d_F, 2 eps^(1-delta)) <= log 2
        + eps^delta log #(X, d, eps) + (1/|F|) log #(X, dbar_F, eps)."""
    base_pts = [(i,) for i in range(len(model.alphabet))]
    e_window = FiniteSubset.of(model.group, [model.group.identity])
    base_metric = OrbitMetric(kind="max", window=e_window, metric=model.metric)
    for n in computed_n:
        F = folner(n)
        pts = list(model.configurations(F))
        d_max = model.orbit_metric("max", F)
        for eps in eps_sorted:
            blow = 2.0 * eps ** (1.0 - delta)
            lhs_lower, lhs_upper = covering_number(pts, d_max, blow)
            base_lower, base_upper = covering_number(base_pts, base_metric, eps)
            avg_row = report.profile_avg.row(eps, n)  # type: ignore[union-attr]
            exact = len(pts) <= EXACT_COVER_MAX and avg_row.exact
            lhs = (math.log(lhs_upper) if exact else math.log(lhs_lower)) / len(F)
            rhs = math.log(2.0) + eps**delta * math.log(base_upper) + avg_row.norm_upper
            report.checks.append(
                {
                    "check": "prop31-window",
                    "kind": "exact",
                    "eps": eps,
                    "n": n,
                    "family": None,
                    "lhs": lhs,
                    "rhs": rhs,
                    "ok": lhs <= rhs + 1e-12,
                }
            )


def _append_ratio_rows(report: VPReport, eps_sorted, computed_n) -> None:
    if not computed_n:
        return
    n_star = max(computed_n)
    for eps in eps_sorted:
        if not 0 < eps < 1:
            continue
        best = None
        for row in report.rate_rows:
            if row["eps"] == eps and row["n"] == n_star:
                if best is None or row["rate_per_symbol"] > best["rate_per_symbol"]:
                    best = row
        s_row = report.profile_max.row(eps, n_star)  # type: ignore[union-attr]
        st_row = report.profile_avg.row(eps, n_star)  # type: ignore[union-attr]
        denom = abs(math.log(eps))
        report.ratio_rows.append(
            {
                "eps": eps,
                "n": n_star,
                "best_rate_per_symbol": best["rate_per_symbol"] if best else None,
                "best_family": best["family"] if best else None,
                "rate_ratio": best["rate_per_symbol"] / denom if best else None,
                "s_ratio": s_row.norm_upper / denom,
                "stilde_ratio": st_row.norm_upper / denom,
            }
        )
    finest = report.ratio_rows[-1] if report.ratio_rows else None
    if finest is not None:
        report.finest_eps_ratio_gap = abs(finest["s_ratio"] - finest["stilde_ratio"])


# ---------------------------------------------------------------------------
# Fano-side lower-bound check (sup-over-measures direction at desk scale)


@dataclass(frozen=True)
class FanoSideRow:
    n: int
    eps: float
    D: float
    separation: float
    s_size: int
    applicable: bool
    holds: bool
    rate: float
    bound: float
    reasons: tuple[str, ...]


def fano_side_check(
    model: SystemModel,
    folner: FolnerSequence,
    n: int,
    eps: float,
    D: float,
    budget_cells: int = DEFAULT_BUDGET_CELLS,
    budget_configs: int = DEFAULT_BUDGET_CONFIGS,
) -> FanoSideRow:
    """Quantize a maximal (8D+2)eps-separated set, solve at target 4 eps, and
    check the Fano lower bound I >= (1 - 1/D) log|S| - H(1/D).

    Preconditions mirror the measure construction: the quantized set must stay
    uniform (no collisions) and 8 D eps-separated under the average metric,
    and the solved channel must meet E dbar < 4 eps.  If any fails, the row is
    reported as not applicable rather than asserted.
    """
    if D <= 2:
        raise ValueError(f"D must exceed 2, got {D}")
    F = folner(n)
    if model.n_configs(F) > budget_configs:
        raise ValueError(f"window {n} exceeds the configuration budget")
    metric = model.orbit_metric("avg", F)
    pts = list(model.configurations(F))
    separation = (8.0 * D + 2.0) * eps
    S = separated_set(pts, metric, separation)
    quant = partition_map(model, eps)
    quantized = [quant.quantize_config(x) for x in S]
    reasons: list[str] = []
    if len(set(quantized)) != len(S):
        reasons.append("quantization collides on the separated set")
    need = 8.0 * D * eps
    for i in range(len(quantized)):
        for j in range(i + 1, len(quantized)):
            if metric.dist(quantized[i], quantized[j]) < need:
                reasons.append("quantized separation below 8*D*eps")
                break
        else:
            continue
        break
    target = 4.0 * eps
    rate = math.nan
    if not reasons:
        mu = Pmf.uniform(sorted(set(quantized)))
        ys = default_codebook(model, mu, eps, len(F))
        res = rd_window(
            mu, model, DistortionSpec("l1"), target, Y=ys, budget_cells=budget_cells
        )
        if not res.feasible or res.distortion >= target:
            reasons.append("channel misses the E dbar < 4 eps precondition")
        else:
            rate = res.rate
    bound = fano_bound(target, D, len(S)) if len(S) >= 1 else -math.inf
    applicable = not reasons
    holds = (not applicable) or rate >= bound - 1e-9
    return FanoSideRow(
        n=n,
        eps=eps,
        D=D,
        separation=separation,
        s_size=len(S),
        applicable=applicable,
        holds=holds,
        rate=rate,
        bound=bound,
        reasons=tuple(reasons),
    )


def folner_crosscheck(
    model: SystemModel,
    measure,
    folner_a: FolnerSequence,
    folner_b: FolnerSequence,
    eps: float,
    n: int,
    budget_cells: int = DEFAULT_BUDGET_CELLS,
) -> dict:
    """Normalized rates for the same measure along two Folner families.

    The limit's independence of the family is a theorem; here only the
    discrepancy at finite n is reported.
    """
    out = {}
    for tag, folner in (("a", folner_a), ("b", folner_b)):
        F = folner(n)
        mu = measure.window_marginal(model, F, eps).restrict_support()
        ys = default_codebook(model, mu, eps, len(F))
        res = rd_window(mu, model, DistortionSpec("l1"), eps, Y=ys, budget_cells=budget_cells)
        out[tag] = {
            "folner": folner.name,
            "window_size": len(F),
            "rate_per_symbol": res.rate / len(F),
        }
    out["discrepancy"] = abs(out["a"]["rate_per_symbol"] - out["b"]["rate_per_symbol"])
    return out
