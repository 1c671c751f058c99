"""Run configuration shared by the pipeline and the command line."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .dataset import DatasetError, load_config

ENV_CONFIG = "PRODSIZE_CONFIG"  # default config path; everything else is explicit


@dataclass(slots=True)
class RunConfig:
    publications: Path | None = None
    roster: Path | None = None
    uda_map: Path | None = None
    out_dir: Path = Path("out")
    period: tuple[int, int] = (2004, 2008)
    life_science_categories: frozenset = frozenset()
    alpha: float = 0.1
    top_threshold: float = 0.20
    loess_span: float = 0.75
    loess_degree: int = 1
    outlier_k: float = 3.0
    permutations: int = 999
    min_units: int = 10
    rel_threshold: float = 0.05  # practical gap for the local-regression verdict
    require_confirm: bool = True
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0.0 < self.loess_span <= 1.0:
            raise ValueError("loess_span must lie in (0, 1]")
        if self.permutations < 999:
            raise ValueError("permutations must be at least 999")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")


_SCALAR_KEYS = (
    "alpha",
    "top_threshold",
    "loess_span",
    "loess_degree",
    "outlier_k",
    "permutations",
    "min_units",
    "rel_threshold",
    "require_confirm",
    "seed",
    "jobs",
)


def config_from_file(path) -> RunConfig:
    """Build a RunConfig from a flat TOML file; paths resolve relative to it."""
    path = Path(path)
    raw = load_config(path)
    base = path.parent
    kwargs = {
        "period": (raw["period_start"], raw["period_end"]),
        "life_science_categories": frozenset(raw["life_science_categories"]),
    }
    for key, default in (("publications", "publications.jsonl"), ("roster", "roster.csv")):
        kwargs[key] = base / raw.get(key, default)
    if "uda_map" in raw:
        kwargs["uda_map"] = base / raw["uda_map"]
    if "out_dir" in raw:
        kwargs["out_dir"] = base / raw["out_dir"]
    for key in _SCALAR_KEYS:
        if key in raw:
            kwargs[key] = raw[key]
    return RunConfig(**kwargs)


def default_config_path() -> Path | None:
    value = os.environ.get(ENV_CONFIG)
    return Path(value) if value else None


def override(config: RunConfig, **updates) -> RunConfig:
    """Copy of `config` with the non-None entries of `updates` applied."""
    names = {f.name for f in fields(RunConfig)}
    clean = {k: v for k, v in updates.items() if v is not None and k in names}
    return replace(config, **clean)


def load_uda_map(path) -> dict[str, str]:
    """Read the field-to-discipline mapping CSV (sds_id,uda_id)."""
    mapping = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["sds_id", "uda_id"]:
            raise DatasetError("uda map header must be sds_id,uda_id")
        for row in reader:
            mapping[row["sds_id"]] = row["uda_id"]
    return mapping
