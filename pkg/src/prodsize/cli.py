"""Command-line entry point: ingest, score, analyze, simulate, report."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import config as config_mod
from . import dataset as dataset_mod
from . import pipeline, scoring, synth
from .config import RunConfig
from .dataset import DatasetError
from .pipeline import PipelineError

EXIT_OK = 0
EXIT_VALIDATION = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prodsize",
        description="Field-standardized research productivity and returns-to-size analysis",
    )
    parser.add_argument("--config", type=Path, default=config_mod.default_config_path(), help="TOML run config")
    parser.add_argument("--seed", type=int, default=None, help="master random seed")
    parser.add_argument("--jobs", type=int, default=None, help="parallel per-field workers")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("ingest", help="load the input files and print a validation report")
    sub.add_parser("score", help="write unit_scores.csv, scientist_scores.csv, baselines.csv")
    sub.add_parser("analyze", help="run the full returns-to-size analysis and write reports")
    sub.add_parser("report", help="pretty-print a previously written report directory")

    sim = sub.add_parser("simulate", help="generate a synthetic world with planted ground truth")
    sim.add_argument("--sds", type=int, default=40, help="number of fields")
    sim.add_argument("--universities", type=int, default=40, help="universities per field")
    sim.add_argument("--beta-default", type=float, default=1.0, help="returns exponent for unlisted fields")
    sim.add_argument("--beta-overrides", type=Path, default=None, help="CSV of sds_id,beta overrides")
    sim.add_argument("--rho", type=float, default=0.0, help="size-quality coupling in [-1, 1]")
    return parser


def _load_run_config(args) -> RunConfig:
    if args.config is not None:
        cfg = config_mod.config_from_file(args.config)
    else:
        cfg = RunConfig()
    return config_mod.override(cfg, seed=args.seed, jobs=args.jobs, out_dir=args.out)


def _load_dataset(cfg: RunConfig) -> dataset_mod.Dataset:
    if cfg.publications is None or cfg.roster is None:
        raise DatasetError("no input files configured; pass --config pointing at a run config")
    pubs = dataset_mod.load_publications(cfg.publications, cfg.life_science_categories)
    roster = dataset_mod.load_roster(cfg.roster)
    return dataset_mod.Dataset(pubs, roster, cfg.period, frozenset(cfg.life_science_categories))


def cmd_ingest(cfg: RunConfig) -> int:
    ds = _load_dataset(cfg)
    report = dataset_mod.validate(ds)
    print(f"publications: {len(ds.publications)}")
    print(f"scientists:   {len(ds.roster)}")
    print(f"period:       {ds.period[0]}-{ds.period[1]}")
    print(f"issues:       {report.issue_count()}")
    for pub_id, uni, sds in report.orphaned_affiliations:
        print(f"  orphaned affiliation: {pub_id} -> ({uni}, {sds})", file=sys.stderr)
    for pub_id in report.out_of_period:
        print(f"  out of period: {pub_id}", file=sys.stderr)
    return EXIT_OK


def cmd_score(cfg: RunConfig) -> int:
    ds = _load_dataset(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    baselines = scoring.compute_baselines(ds)
    scoring.write_unit_scores(scoring.compute_unit_scores(ds, baselines), out / "unit_scores.csv")
    scoring.write_scientist_scores(scoring.compute_scientist_scores(ds, baselines), out / "scientist_scores.csv")
    scoring.write_baselines(baselines, out / "baselines.csv")
    print(f"wrote scores to {out}")
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    ds = _load_dataset(cfg)
    uda_map = config_mod.load_uda_map(cfg.uda_map) if cfg.uda_map else None
    report = pipeline.run_analysis(ds, cfg, uda_map)
    pipeline.write_report(report, cfg.out_dir, cfg.top_threshold)
    print(pipeline.format_summary_table(report))
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    summary = out / "report_summary.csv"
    increasing = out / "report_increasing.csv"
    if not summary.exists() or not increasing.exists():
        raise DatasetError(f"no report found under {out}; run `prodsize analyze` first")
    print(summary.read_text(encoding="utf-8").rstrip())
    print()
    print(increasing.read_text(encoding="utf-8").rstrip())
    return EXIT_OK


def _load_beta_overrides(path) -> dict[str, float]:
    overrides = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("sds_id"):
                continue
            sds, beta = line.split(",")
            overrides[sds] = float(beta)
    return overrides


def cmd_simulate(cfg: RunConfig, args) -> int:
    overrides = _load_beta_overrides(args.beta_overrides) if args.beta_overrides else {}
    world_cfg = synth.WorldConfig(
        n_sds=args.sds,
        n_universities=args.universities,
        beta_default=args.beta_default,
        beta_overrides=overrides,
        rho=args.rho,
        seed=cfg.seed,
    )
    ds, truth = synth.generate_world(world_cfg)
    paths = synth.world_to_files(ds, cfg.out_dir, truth)
    print(f"wrote {len(ds.publications)} publications, {len(ds.roster)} scientists to {cfg.out_dir}")
    for name in sorted(paths):
        print(f"  {name}: {paths[name]}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_run_config(args)
        if args.command == "ingest":
            return cmd_ingest(cfg)
        if args.command == "score":
            return cmd_score(cfg)
        if args.command == "analyze":
            return cmd_analyze(cfg)
        if args.command == "report":
            return cmd_report(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg, args)
        raise AssertionError(f"unhandled command {args.command}")
    except (DatasetError, PipelineError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
