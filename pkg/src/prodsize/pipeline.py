"""Two-stage returns-to-size analysis over all fields, plus report output.

Stage one screens out fields where top or inactive scientists concentrate
by unit size (there any size-productivity link could reflect staff quality
rather than returns to size). Stage two tests the dichotomized
size-productivity association, then cross-checks it with a permutation
test over size quartiles and a local regression with robust outlier
removal.
"""

from __future__ import annotations

import csv
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import classify, scoring, stats
from .classify import SdsFrame
from .config import RunConfig
from .dataset import Dataset, validate
from .stats import AssociationResult, LoessFit, QuartileGroups

INCREASING = "increasing"
CONSTANT = "constant"
NOT_RUN = "not_run"

EXCLUDED = "excluded"
CONSTANT_RETURNS = "constant_returns"
INCREASING_RETURNS = "increasing_returns"

ANALYSES = ("top", "inactive", "size_prod")


class PipelineError(RuntimeError):
    pass


@dataclass(slots=True)
class ConfirmResult:
    npc_p: float | None = None
    loess_verdict: str = NOT_RUN
    groups: QuartileGroups | None = None
    fit: LoessFit | None = None  # refit after outlier removal
    outliers: frozenset[int] = frozenset()


@dataclass(slots=True)
class SdsResult:
    sds_id: str
    uda_id: str
    n_units: int
    top_assoc: AssociationResult
    inactive_assoc: AssociationResult
    screened_out: bool
    size_prod_assoc: AssociationResult | None = None
    npc_p: float | None = None
    loess_verdict: str = NOT_RUN
    final_class: str = EXCLUDED


@dataclass(frozen=True, slots=True)
class SummaryRow:
    uda_id: str
    analysis: str
    n_sds: int
    n_significant: int

    @property
    def share(self) -> float:
        return self.n_significant / self.n_sds if self.n_sds else 0.0


@dataclass(frozen=True, slots=True)
class IncreasingRow:
    sds_id: str
    uda_id: str
    tau_b: float
    p_value: float
    stars: str


@dataclass(slots=True)
class Report:
    results: list[SdsResult] = field(default_factory=list)
    summary: list[SummaryRow] = field(default_factory=list)
    increasing: list[IncreasingRow] = field(default_factory=list)
    frames: list[SdsFrame] = field(default_factory=list)
    confirmations: dict[str, ConfirmResult] = field(default_factory=dict)


def derive_sds_seed(master_seed: int, sds_id: str) -> int:
    """Stable per-field seed, independent of scheduling order."""
    digest = hashlib.blake2b(f"{master_seed}:{sds_id}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def _association(frame: SdsFrame, var_a: str, alpha: float, top_threshold: float) -> AssociationResult:
    table = classify.contingency(frame, var_a, "size", top_threshold)
    g, p = stats.g_test(table)
    tau = stats.kendall_tau_b_2x2(table)
    (r1, r2), (c1, c2) = table.margins()
    degenerate = min(r1, r2, c1, c2) == 0
    return AssociationResult(
        g_statistic=g,
        p_value=p,
        tau_b=tau,
        significant=p < alpha,
        degenerate=degenerate,
    )


def stage_quality_screen(
    frame: SdsFrame,
    alpha: float = 0.1,
    min_units: int = 10,
    top_threshold: float = 0.20,
) -> tuple[AssociationResult, AssociationResult, bool]:
    """Test whether top or inactive scientists concentrate by unit size.

    A field is screened out when either association is significant, since
    its size-productivity link could then be driven by staff quality.
    Fields below `min_units` are conservatively screened out with both
    results flagged not_run.
    """
    if len(frame.units) < min_units:
        skipped = AssociationResult(not_run=True)
        return skipped, AssociationResult(not_run=True), True
    top = _association(frame, "top_share", alpha, top_threshold)
    inactive = _association(frame, "inactive_share", alpha, top_threshold)
    return top, inactive, top.significant or inactive.significant


def stage_size_productivity(frame: SdsFrame, alpha: float = 0.1, top_threshold: float = 0.20) -> AssociationResult:
    """Dependence analysis of dichotomized productivity against size."""
    return _association(frame, "productivity", alpha, top_threshold)


def loess_verdict(fit: LoessFit, rel_threshold: float = 0.05) -> str:
    """Classify a fitted size-productivity curve as increasing or constant.

    Increasing requires a positive endpoint-to-endpoint slope across the
    interquartile size range and a fitted gain of more than `rel_threshold`
    relative to the fitted value at the 25th size percentile.
    """
    sizes = fit.x[fit.included_idx]
    q25, q75 = np.percentile(sizes, [25.0, 75.0])
    if q75 <= q25:
        return CONSTANT
    f25 = fit.predict(float(q25))
    f75 = fit.predict(float(q75))
    if f75 <= f25:
        return CONSTANT
    return INCREASING if (f75 - f25) > rel_threshold * abs(f25) else CONSTANT


def stage_confirm(frame: SdsFrame, assoc: AssociationResult | None, config: RunConfig, seed: int) -> ConfirmResult:
    """Quartile permutation test and local-regression check for one field.

    Outliers flagged by the robust residual rule are removed and the curve
    refit before the verdict. Fields with fewer than 8 units, or too few
    points after removal, come back flagged not_run.
    """
    del assoc  # recorded by the caller; the confirmation itself is unconditional
    points = [(r.size, r.productivity) for r in frame.units]
    if len(points) < 8:
        return ConfirmResult()
    groups = stats.quartile_split(points)
    npc_p = stats.npc_test(groups, n_permutations=config.permutations, seed=seed)
    result = ConfirmResult(npc_p=npc_p, groups=groups)
    try:
        first = stats.loess_fit(points, config.loess_span, config.loess_degree)
        outliers = stats.detect_outliers_residual(first, config.outlier_k)
        refit = stats.loess_fit(points, config.loess_span, config.loess_degree, exclude=outliers)
    except ValueError:
        return result  # loess verdict stays not_run
    result.fit = refit
    result.outliers = outliers
    result.loess_verdict = loess_verdict(refit, config.rel_threshold)
    return result


def _analyze_sds(sds_id: str, frame: SdsFrame, uda_id: str, config: RunConfig) -> tuple[SdsResult, ConfirmResult]:
    seed = derive_sds_seed(config.seed, sds_id)
    top, inactive, screened = stage_quality_screen(frame, config.alpha, config.min_units, config.top_threshold)
    result = SdsResult(
        sds_id=sds_id,
        uda_id=uda_id,
        n_units=len(frame.units),
        top_assoc=top,
        inactive_assoc=inactive,
        screened_out=screened,
    )
    confirm = ConfirmResult()
    if len(frame.units) >= config.min_units:
        result.size_prod_assoc = stage_size_productivity(frame, config.alpha, config.top_threshold)
        confirm = stage_confirm(frame, result.size_prod_assoc, config, seed)
        result.npc_p = confirm.npc_p
        result.loess_verdict = confirm.loess_verdict
    if screened:
        result.final_class = EXCLUDED
    else:
        assoc = result.size_prod_assoc
        increasing = assoc is not None and assoc.significant and assoc.tau_b > 0
        if increasing and config.require_confirm:
            npc_ok = confirm.npc_p is not None and confirm.npc_p < config.alpha
            increasing = npc_ok or confirm.loess_verdict == INCREASING
        result.final_class = INCREASING_RETURNS if increasing else CONSTANT_RETURNS
    return result, confirm


def _stars(p: float) -> str:
    if p < 0.05:
        return "**"
    if p < 0.10:
        return "*"
    return ""


def _summarize(results: list[SdsResult]) -> list[SummaryRow]:
    by_uda: dict[str, list[SdsResult]] = {}
    for r in results:
        by_uda.setdefault(r.uda_id, []).append(r)
    rows = []
    for analysis in ANALYSES:
        for uda in sorted(by_uda) + ["TOTAL"]:
            group = results if uda == "TOTAL" else by_uda[uda]
            sig = 0
            for r in group:
                assoc = {
                    "top": r.top_assoc,
                    "inactive": r.inactive_assoc,
                    "size_prod": r.size_prod_assoc,
                }[analysis]
                if assoc is not None and assoc.significant:
                    sig += 1
            rows.append(SummaryRow(uda, analysis, len(group), sig))
    return rows


def run_analysis(dataset: Dataset, config: RunConfig, uda_map: dict[str, str] | None = None) -> Report:
    """Score, classify, and test every field; aggregate into a Report.

    Per-field work is independent: the permutation seed for each field is
    derived from the master seed and the field id, so results match across
    any `jobs` setting. Raises PipelineError on an empty dataset.
    """
    if not dataset.publications or not dataset.roster:
        raise PipelineError("dataset has no publications or no roster")
    validate(dataset)  # orphan warnings surface through dataset loading paths
    uda_map = uda_map or {}

    baselines = scoring.compute_baselines(dataset)
    unit_scores = scoring.compute_unit_scores(dataset, baselines)
    scientist_scores = scoring.compute_scientist_scores(dataset, baselines)

    sds_ids = sorted({rec.sds_id for rec in dataset.roster})
    scores_by_sds: dict[str, list] = {s: [] for s in sds_ids}
    for s in scientist_scores:
        scores_by_sds.setdefault(s.sds_id, []).append(s)
    units_by_sds: dict[str, list] = {s: [] for s in sds_ids}
    for u in unit_scores:
        units_by_sds.setdefault(u.sds_id, []).append(u)
    roster_by_sds: dict[str, list] = {s: [] for s in sds_ids}
    for rec in dataset.roster:
        roster_by_sds[rec.sds_id].append(rec)

    def job(sds_id: str) -> tuple[SdsFrame, SdsResult, ConfirmResult]:
        labels = classify.label_scientists(sds_id, scores_by_sds.get(sds_id, []))
        frame = classify.build_frame(sds_id, units_by_sds.get(sds_id, []), labels, roster_by_sds.get(sds_id, []))
        uda = uda_map.get(sds_id, "ALL")
        result, confirm = _analyze_sds(sds_id, frame, uda, config)
        return frame, result, confirm

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = dict(zip(sds_ids, pool.map(job, sds_ids)))
    else:
        outcomes = {sds_id: job(sds_id) for sds_id in sds_ids}

    report = Report()
    for sds_id in sds_ids:  # deterministic ordered reduce
        frame, result, confirm = outcomes[sds_id]
        report.frames.append(frame)
        report.results.append(result)
        report.confirmations[sds_id] = confirm
        if result.final_class == INCREASING_RETURNS:
            assoc = result.size_prod_assoc
            report.increasing.append(
                IncreasingRow(sds_id, result.uda_id, assoc.tau_b, assoc.p_value, _stars(assoc.p_value))
            )
    report.summary = _summarize(report.results)
    return report


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def write_report(report: Report, out_dir, top_threshold: float = 0.20) -> None:
    """Write the summary, increasing-returns list, frames, and plot data."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report_summary.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["uda_id", "analysis", "n_sds", "n_significant", "share"])
        for row in report.summary:
            writer.writerow([row.uda_id, row.analysis, row.n_sds, row.n_significant, _fmt(row.share)])
    with open(out / "report_increasing.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sds_id", "uda_id", "tau_b", "p_value", "stars"])
        for row in report.increasing:
            writer.writerow([row.sds_id, row.uda_id, _fmt(row.tau_b), _fmt(row.p_value), row.stars])
    classify.write_frames(report.frames, out / "frames.csv", top_threshold)

    plots = out / "plots"
    plots.mkdir(exist_ok=True)
    for sds_id, confirm in sorted(report.confirmations.items()):
        if confirm.groups is not None:
            with open(plots / f"{sds_id}_box.csv", "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["quartile", "n", "q1", "median", "q3", "whisker_lo", "whisker_hi", "outliers"])
                for i, (group, box) in enumerate(zip(confirm.groups.groups, confirm.groups.boxstats), start=1):
                    writer.writerow(
                        [
                            i,
                            len(group),
                            _fmt(box.q1),
                            _fmt(box.median),
                            _fmt(box.q3),
                            _fmt(box.whisker_lo),
                            _fmt(box.whisker_hi),
                            ";".join(_fmt(v) for v in box.outliers),
                        ]
                    )
        if confirm.fit is not None:
            fit = confirm.fit
            with open(plots / f"{sds_id}_loess.csv", "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["x", "fitted", "is_outlier"])
                for i in np.argsort(fit.x, kind="stable"):
                    writer.writerow(
                        [_fmt(float(fit.x[i])), _fmt(fit.predict(float(fit.x[i]))), int(i in fit.excluded)]
                    )


def format_summary_table(report: Report) -> str:
    """Human-readable per-discipline significance counts for stdout."""
    cells: dict[tuple[str, str], SummaryRow] = {(r.uda_id, r.analysis): r for r in report.summary}
    udas = sorted({r.uda_id for r in report.summary} - {"TOTAL"}) + ["TOTAL"]
    width = max([len(u) for u in udas] + [12])
    lines = [f"{'UDA':<{width}}  {'top':>18} {'inactive':>18} {'size_prod':>18}"]
    for uda in udas:
        parts = [f"{uda:<{width}}"]
        for analysis in ANALYSES:
            row = cells.get((uda, analysis))
            text = "-" if row is None else f"{row.n_significant} of {row.n_sds} ({100 * row.share:.0f}%)"
            parts.append(f"{text:>18}")
        lines.append("  ".join([parts[0]] + parts[1:]).rstrip())
    n_increasing = len(report.increasing)
    lines.append("")
    lines.append(f"fields with increasing returns to size: {n_increasing}")
    for row in report.increasing:
        lines.append(f"  {row.sds_id} ({row.uda_id})  tau_b={row.tau_b:+.4f}{row.stars}")
    return "\n".join(lines)
