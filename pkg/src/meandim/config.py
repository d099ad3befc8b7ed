"""Flat key-value experiment configuration with JSON payloads.

Config files are lines of ``key = value`` where value is JSON; ``#`` starts a
comment.  All referenced names (group, folner, alphabet, measures) must
resolve at load time, with line-level diagnostics on failure.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .groups import FolnerSequence, GroupModel, box, folner_boxes, folner_rects
from .ratedist import (
    DEFAULT_BUDGET_CELLS,
    EmpiricalFamily,
    MarkovMeasure,
    ProductMeasure,
    markov_family,
    product_family,
)
from .spaces import SystemModel


class ConfigError(ValueError):
    pass


_DEFAULTS: dict[str, Any] = {
    "group": "Z",
    "folner": "boxes",
    "alphabet": "binary",
    "metric": "auto",
    "metric_kind": "max",
    "eps_grid": [0.1, 0.2],
    "n_range": [1, 2],
    "distortion": {"kind": "l1"},
    "measures": ["product_uniform"],
    "seed": 0,
    "budget_cells": DEFAULT_BUDGET_CELLS,
    "budget_configs": 10_000,
    "tile_side": 4,
    "tile_window": 12,
    "tile_eps": 0.1,
    "slack": 1e-6,
    "prop31_delta": 0.5,
    "empirical_sep_factor": 2.0,
    "product_simplex_steps": 4,
    "alphas": [0.1, 0.01],
}


def parse_flat_config(text: str) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, payload = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        try:
            values[key] = json.loads(payload.strip())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {lineno}: field {key!r}: invalid JSON ({exc.msg})")
    return values


@dataclass
class ExperimentConfig:
    values: dict[str, Any]
    sha256: str
    source: str = "<memory>"
    extras: dict[str, Any] = field(default_factory=dict)

    @staticmethod
    def from_file(path: str) -> "ExperimentConfig":
        with open(path, "rb") as fh:
            raw = fh.read()
        values = parse_flat_config(raw.decode("utf-8"))
        cfg = ExperimentConfig(
            values={**_DEFAULTS, **values},
            sha256=hashlib.sha256(raw).hexdigest(),
            source=path,
        )
        cfg.validate()
        return cfg

    @staticmethod
    def from_values(values: dict[str, Any]) -> "ExperimentConfig":
        merged = {**_DEFAULTS, **values}
        canon = json.dumps(merged, sort_keys=True).encode("utf-8")
        cfg = ExperimentConfig(values=merged, sha256=hashlib.sha256(canon).hexdigest())
        cfg.validate()
        return cfg

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def validate(self) -> None:
        v = self.values
        if not isinstance(v["eps_grid"], list) or not v["eps_grid"]:
            raise ConfigError("field 'eps_grid': must be a nonempty list")
        if any(not isinstance(e, (int, float)) or e <= 0 for e in v["eps_grid"]):
            raise ConfigError("field 'eps_grid': entries must be positive numbers")
        nr = v["n_range"]
        if (
            not isinstance(nr, list)
            or len(nr) != 2
            or any(not isinstance(x, int) for x in nr)
            or nr[0] < 1
            or nr[1] < nr[0]
        ):
            raise ConfigError("field 'n_range': must be [lo, hi] with 1 <= lo <= hi")
        kind = v["distortion"].get("kind") if isinstance(v["distortion"], dict) else None
        if kind not in ("l1", "lp", "linf"):
            raise ConfigError("field 'distortion': kind must be one of l1, lp, linf")
        if kind == "lp" and v["distortion"].get("p", 1) < 1:
            raise ConfigError("field 'distortion': p must be >= 1")
        if kind == "linf":
            a = v["distortion"].get("alpha", 0.1)
            if not 0 < a <= 0.5:
                raise ConfigError("field 'distortion': alpha must lie in (0, 1/2]")
        # eagerly resolve names so config errors surface before any work
        self.group()
        self.folner()
        self.model()
        self.measures()

    def group(self) -> GroupModel:
        name = self.values["group"]
        if name == "Z":
            return GroupModel.integers()
        if isinstance(name, str) and name.startswith("Z") and name[1:].isdigit():
            return GroupModel.lattice(int(name[1:]))
        raise ConfigError(f"field 'group': unknown group {name!r}")

    def folner(self) -> FolnerSequence:
        g = self.group()
        name = self.values["folner"]
        if name == "boxes":
            return folner_boxes(g)
        if isinstance(name, dict) and "rects" in name:
            return folner_rects(g, name["rects"])
        raise ConfigError(f"field 'folner': unknown family {name!r}")

    def model(self) -> SystemModel:
        g = self.group()
        alpha_spec = self.values["alphabet"]
        if alpha_spec == "binary":
            alphabet = (0.0, 1.0)
        elif isinstance(alpha_spec, dict) and "grid" in alpha_spec:
            m = int(alpha_spec["grid"])
            if m < 1:
                raise ConfigError("field 'alphabet': grid pitch must be >= 1")
            alphabet = tuple(k / m for k in range(m + 1))
        elif isinstance(alpha_spec, list):
            alphabet = tuple(float(a) for a in alpha_spec)
        else:
            raise ConfigError(f"field 'alphabet': unknown alphabet {alpha_spec!r}")
        metric_spec = self.values["metric"]
        if metric_spec == "hamming":
            metric = 1.0 - np.eye(len(alphabet))
        elif metric_spec in ("absdiff", "auto"):
            arr = np.asarray(alphabet, dtype=float)
            metric = np.abs(arr[:, None] - arr[None, :])
            if metric_spec == "auto" and alpha_spec == "binary":
                metric = 1.0 - np.eye(2)
        elif isinstance(metric_spec, list):
            metric = np.asarray(metric_spec, dtype=float)
        else:
            raise ConfigError(f"field 'metric': unknown metric {metric_spec!r}")
        n_hi = self.values["n_range"][1]
        window = box(g, n_hi)
        try:
            return SystemModel(alphabet=alphabet, metric=metric, group=g, window=window)
        except ValueError as exc:
            raise ConfigError(f"field 'metric': {exc}")

    def distortion_kind(self) -> str:
        return self.values["distortion"]["kind"]

    def measures(self) -> list:
        model = self.model()
        na = len(model.alphabet)
        metric_kind = "max" if self.distortion_kind() == "linf" else "avg"
        out = []
        for name in self.values["measures"]:
            if name == "product_uniform":
                out.append(ProductMeasure(np.full(na, 1.0 / na), name="product[uniform]"))
            elif isinstance(name, dict) and "product" in name:
                out.append(ProductMeasure(name["product"], name="product[custom]"))
            elif name == "product_grid":
                out.extend(product_family(model, int(self.values["product_simplex_steps"])))
            elif name == "markov":
                fam = markov_family(model)
                if not fam:
                    raise ConfigError("field 'measures': markov family needs a binary alphabet over Z")
                out.extend(fam)
            elif name == "empirical":
                out.append(
                    EmpiricalFamily(
                        sep_factor=float(self.values["empirical_sep_factor"]),
                        metric_kind=metric_kind,
                    )
                )
            else:
                raise ConfigError(f"field 'measures': unknown measure {name!r}")
        if not out:
            raise ConfigError("field 'measures': at least one measure required")
        return out

    def n_values(self) -> list[int]:
        lo, hi = self.values["n_range"]
        return list(range(lo, hi + 1))
