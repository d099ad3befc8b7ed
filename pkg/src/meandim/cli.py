"""Command-line front end: deterministic experiment runs with CSV/JSON output.

Subcommands: mdim, rd, verify-vp, tiling, selftest.  Every output embeds the
config hash and toolkit version; fixed seed and config give byte-identical
files.  CSV is comma-delimited UTF-8 with LF line endings; metadata rides in
leading ``#`` comment lines.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig
from .groups import box
from .infotheory import property_suite
from .mdim import fano_side_check, mdim_slopes, s_profile, verify_vp
from .ratedist import DistortionSpec, linf_alpha_path, ordering_suite, rd_normalized
from .tilings import covering_multiplicity, density_report, tile_boxes, tiling_to_json, validate


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, columns: list[str], rows: list[dict], meta: dict) -> None:
    lines = [f"# {k}={v}" for k, v in sorted(meta.items())]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(row.get(c)) for c in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_json(path: Path, payload: dict, meta: dict) -> None:
    doc = {"meta": meta, **payload}
    path.write_text(
        json.dumps(doc, sort_keys=True, indent=1, ensure_ascii=False) + "\n",
        encoding="utf-8",
        newline="\n",
    )


def _meta(cfg: ExperimentConfig, seed: int) -> dict:
    return {"config_sha256": cfg.sha256, "version": __version__, "seed": seed}


def cmd_mdim(cfg: ExperimentConfig, out_dir: Path, seed: int, jobs: int) -> int:
    model = cfg.model()
    folner = cfg.folner()
    eps_grid = sorted(cfg["eps_grid"], reverse=True)
    est = s_profile(
        model,
        folner,
        eps_grid,
        cfg.n_values(),
        metric_kind=cfg["metric_kind"],
        budget_configs=cfg["budget_configs"],
    )
    payload = {"profile": est.as_json()}
    if len(eps_grid) >= 3 and all(0 < e < 1 for e in eps_grid):
        slopes = mdim_slopes(est)
        payload["slopes"] = {
            "upper_slope": slopes.upper_slope,
            "lower_slope": slopes.lower_slope,
            "regression_slope": slopes.regression_slope,
            "ratios": list(slopes.ratios),
        }
    meta = _meta(cfg, seed)
    write_json(out_dir / "mdim.json", payload, meta)
    cols = ["eps", "n", "window_size", "n_points", "lower", "upper", "exact", "norm_lower", "norm_upper"]
    write_csv(out_dir / "mdim.csv", cols, payload["profile"]["rows"], meta)
    return 0


def _rd_task(args: tuple) -> list[dict]:
    values, measure_index, eps = args
    cfg = ExperimentConfig.from_values(values)
    model = cfg.model()
    folner = cfg.folner()
    measure = cfg.measures()[measure_index]
    dist = cfg["distortion"]
    spec = DistortionSpec(dist["kind"], p=float(dist.get("p", 1.0)))
    alpha = dist.get("alpha") if dist["kind"] == "linf" else None
    result = rd_normalized(
        measure,
        model,
        spec,
        folner,
        cfg.n_values(),
        eps,
        alpha=alpha,
        budget_cells=cfg["budget_cells"],
    )
    rows = [dict(r) for r in result.rows]
    if result.truncated_at is not None:
        for r in rows:
            r["truncated_at"] = result.truncated_at
    if dist["kind"] == "linf" and dist.get("alphas"):
        rows.extend(
            linf_alpha_path(
                measure,
                model,
                folner,
                cfg.n_values()[-1],
                eps,
                dist["alphas"],
                budget_cells=cfg["budget_cells"],
            )
        )
    return rows


def cmd_rd(cfg: ExperimentConfig, out_dir: Path, seed: int, jobs: int) -> int:
    measures = cfg.measures()
    tasks = [
        (cfg.values, mi, eps)
        for mi in range(len(measures))
        for eps in sorted(cfg["eps_grid"], reverse=True)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_rd_task, tasks))
    else:
        chunks = [_rd_task(t) for t in tasks]
    rows = [row for chunk in chunks for row in chunk]
    meta = _meta(cfg, seed)
    cols = [
        "eps",
        "n",
        "alpha",
        "measure",
        "rate",
        "rate_per_symbol",
        "distortion",
        "multiplier",
        "gap",
        "feasible",
        "converged",
    ]
    write_csv(out_dir / "rd.csv", cols, rows, meta)
    write_json(out_dir / "rd.json", {"rows": rows}, meta)
    infeasible = sum(1 for r in rows if not r.get("feasible", True))
    if infeasible:
        print(f"rd: {infeasible} infeasible target rows (flagged in output)")
    return 0


def cmd_verify_vp(cfg: ExperimentConfig, out_dir: Path, seed: int, jobs: int) -> int:
    model = cfg.model()
    folner = cfg.folner()
    dist = cfg["distortion"]
    report = verify_vp(
        model,
        folner,
        cfg["eps_grid"],
        cfg.n_values(),
        cfg.measures(),
        mode=dist["kind"],
        p=float(dist.get("p", 2.0)),
        alpha=float(dist.get("alpha", 0.1)),
        slack=float(cfg["slack"]),
        budget_cells=cfg["budget_cells"],
        budget_configs=cfg["budget_configs"],
        model_name=f"{cfg['group']}/{cfg['alphabet']}",
        prop31_delta=float(cfg["prop31_delta"]),
    )
    meta = _meta(cfg, seed)
    write_json(out_dir / "verify_vp.json", report.as_json(), meta)
    cols = ["check", "kind", "eps", "n", "family", "lhs", "rhs", "ok"]
    write_csv(out_dir / "verify_vp.csv", cols, report.checks, meta)
    failures = [c for c in report.checks if c["kind"] == "exact" and not c["ok"]]
    for c in failures:
        print(f"EXACT FAIL {c['check']} eps={c['eps']} n={c['n']}: {c['lhs']} > {c['rhs']}")
    print(f"verify-vp: {len(report.checks)} checks, {len(failures)} exact failures")
    return 1 if failures else 0


def cmd_tiling(cfg: ExperimentConfig, out_dir: Path, seed: int, jobs: int) -> int:
    group = cfg.group()
    side = int(cfg["tile_side"])
    window = box(group, int(cfg["tile_window"]))
    tiling = tile_boxes(group, window, side)
    report = validate(tiling)
    dens = density_report(tiling, window)
    rows = []
    for j in range(len(tiling.shapes)):
        max_mult, covered = covering_multiplicity(tiling, window, j, float(cfg["tile_eps"]))
        rows.append(
            {
                "shape": j,
                "shape_size": len(tiling.shapes[j]),
                "centers": len(tiling.centers[j]),
                "density": dens.per_shape[j],
                "max_mult": max_mult,
                "covered_fraction": covered,
                "remainder_fraction": report.remainder_fraction,
                "valid": report.valid,
            }
        )
    meta = _meta(cfg, seed)
    write_json(
        out_dir / "tiling.json",
        {
            "tiling": tiling_to_json(tiling),
            "valid": report.valid,
            "violations": list(report.violations),
            "remainder_fraction": report.remainder_fraction,
            "density_total": dens.total,
        },
        meta,
    )
    cols = [
        "shape",
        "shape_size",
        "centers",
        "density",
        "max_mult",
        "covered_fraction",
        "remainder_fraction",
        "valid",
    ]
    write_csv(out_dir / "tiling_report.csv", cols, rows, meta)
    return 0


def cmd_selftest(cfg: ExperimentConfig, out_dir: Path, seed: int, jobs: int) -> int:
    """Small deterministic battery across all subsystems."""
    meta = _meta(cfg, seed)
    status = 0

    suite = property_suite(trials=2000, seed=seed)
    payload = suite.as_json()
    payload.pop("elapsed_seconds", None)  # wall time is not deterministic
    write_json(out_dir / "selftest_infotheory.json", payload, meta)
    if not suite.passed:
        status = 1

    binary = ExperimentConfig.from_values(
        {
            "alphabet": "binary",
            "metric": "hamming",
            "eps_grid": [0.1, 0.2, 0.3],
            "n_range": [1, 3],
            "measures": ["product_uniform", "markov", "empirical"],
            "seed": seed,
        }
    )
    if cmd_rd(binary, out_dir, seed, jobs) != 0:
        status = 1
    if cmd_verify_vp(binary, out_dir, seed, jobs) != 0:
        status = 1
    if cmd_mdim(binary, out_dir, seed, jobs) != 0:
        status = 1
    if cmd_tiling(cfg, out_dir, seed, jobs) != 0:
        status = 1

    model = binary.model()
    folner = binary.folner()
    ordering_rows = []
    for measure in binary.measures()[:1]:
        ordering_rows.extend(
            ordering_suite(model, measure, folner(2), eps=0.1, ps=(1, 2), alphas=(0.1,))
        )
    fano = fano_side_check(model, folner, n=2, eps=1 / 32, D=4.0)
    write_json(
        out_dir / "selftest_checks.json",
        {
            "ordering": ordering_rows,
            "ordering_ok": all(r["ok"] for r in ordering_rows),
            "fano_side": {
                "applicable": fano.applicable,
                "holds": fano.holds,
                "s_size": fano.s_size,
                "rate": None if fano.rate != fano.rate else fano.rate,
                "bound": fano.bound,
            },
        },
        meta,
    )
    if not all(r["ok"] for r in ordering_rows) or not fano.holds:
        status = 1
    print(f"selftest: status {status}")
    return status


COMMANDS = {
    "mdim": cmd_mdim,
    "rd": cmd_rd,
    "verify-vp": cmd_verify_vp,
    "tiling": cmd_tiling,
    "selftest": cmd_selftest,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="meandim",
        description="Covering growth, tilings, and rate-distortion for shift systems.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", type=str, default=None, help="flat key-value config file")
    parser.add_argument("--out-dir", type=str, default="out", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    parser.add_argument("--budget-cells", type=int, default=None, help="override joint-size cap")
    args = parser.parse_args(argv)

    try:
        if args.config:
            cfg = ExperimentConfig.from_file(args.config)
        else:
            cfg = ExperimentConfig.from_values({})
        if args.budget_cells is not None:
            cfg = ExperimentConfig.from_values({**cfg.values, "budget_cells": args.budget_cells})
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    seed = args.seed if args.seed is not None else int(cfg["seed"])
    np.random.default_rng(seed)  # commands derive their own generators from this seed
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](cfg, out_dir, seed, max(1, args.jobs))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
