"""Scientist labeling and the dichotomizations feeding the 2x2 tables.

Within each field, scientists are labeled top (individual score strictly
above the national 80th percentile, nearest-rank), inactive (score 0), or
ordinary. Units are then dichotomized: size and inactive-share at the
field median (ties to the low side), top-share at a fixed 20% threshold,
productivity at the field median.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

TOP = "top"
INACTIVE = "inactive"
ORDINARY = "ordinary"

VARIABLES = ("size", "productivity", "top_share", "inactive_share")


@dataclass(frozen=True, slots=True)
class UnitRow:
    university_id: str
    size: float  # average research staff
    productivity: float
    top_share: float
    inactive_share: float


@dataclass(slots=True)
class SdsFrame:
    """Active units of one field plus the national medians used for splits."""

    sds_id: str
    units: list[UnitRow]
    size_median: float = math.nan
    productivity_median: float = math.nan
    inactive_share_median: float = math.nan
    excluded_units: tuple[str, ...] = ()  # no publications or no staff in period


@dataclass(frozen=True, slots=True)
class ContingencyTable2x2:
    """Cell counts with rows = var A low/high and cols = var B low/high."""

    a: int  # (low, low)
    b: int  # (low, high)
    c: int  # (high, low)
    d: int  # (high, high)
    row_variable: str = ""
    col_variable: str = ""

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    def margins(self):
        return (self.a + self.b, self.c + self.d), (self.a + self.c, self.b + self.d)

    def expected(self):
        (r1, r2), (c1, c2) = self.margins()
        n = self.n
        return (r1 * c1 / n, r1 * c2 / n, r2 * c1 / n, r2 * c2 / n)


def _nearest_rank_percentile(values, q: float) -> float:
    """Value at the smallest rank covering fraction q of the sorted sample."""
    s = sorted(values)
    rank = math.ceil(q * len(s) - 1e-9)  # guard against 0.8*15 -> 12.000000000000002
    return s[max(rank, 1) - 1]


def label_scientists(sds_id, scientist_scores) -> dict[str, str]:
    """Label every scientist of one field as top / inactive / ordinary.

    `scientist_scores` must cover the field's national population; entries
    for other fields are ignored. Top status requires a score strictly
    above the 80th percentile (nearest-rank, inactives included), so the
    two labels never overlap.
    """
    scores = [s for s in scientist_scores if s.sds_id == sds_id]
    if not scores:
        return {}
    if len(scores) < 5:
        warnings.warn(f"SDS {sds_id!r} has only {len(scores)} scientists; percentile poorly supported", stacklevel=2)
    cutoff = _nearest_rank_percentile([s.fsc for s in scores], 0.80)
    labels = {}
    for s in scores:
        if s.fsc == 0.0:
            labels[s.scientist_id] = INACTIVE
        elif s.fsc > cutoff:
            labels[s.scientist_id] = TOP
        else:
            labels[s.scientist_id] = ORDINARY
    return labels


def _median(values) -> float:
    s = sorted(values)
    n = len(s)
    mid = n // 2
    if n % 2:
        return float(s[mid])
    return (s[mid - 1] + s[mid]) / 2.0


def build_frame(sds_id, unit_scores, labels, roster) -> SdsFrame:
    """Assemble the per-unit analysis rows for one field.

    Active units need at least one attributed publication and staff
    presence in the period; the rest are recorded in `excluded_units`.
    Shares are over the unit's roster headcount, medians over active units
    only.
    """
    members: dict[str, list[str]] = {}
    for rec in roster:
        if rec.sds_id == sds_id:
            members.setdefault(rec.university_id, []).append(rec.scientist_id)
    rows = []
    excluded = []
    for score in unit_scores:
        if score.sds_id != sds_id:
            continue
        staff = members.get(score.university_id, [])
        if score.n_pubs < 1 or score.rs <= 0.0 or not staff:
            excluded.append(score.university_id)
            continue
        n_top = sum(1 for sid in staff if labels.get(sid) == TOP)
        n_inactive = sum(1 for sid in staff if labels.get(sid) == INACTIVE)
        rows.append(
            UnitRow(
                university_id=score.university_id,
                size=score.rs,
                productivity=score.productivity,
                top_share=n_top / len(staff),
                inactive_share=n_inactive / len(staff),
            )
        )
    rows.sort(key=lambda r: r.university_id)
    frame = SdsFrame(sds_id, rows, excluded_units=tuple(sorted(excluded)))
    if rows:
        frame.size_median = _median([r.size for r in rows])
        frame.productivity_median = _median([r.productivity for r in rows])
        frame.inactive_share_median = _median([r.inactive_share for r in rows])
    return frame


def _threshold(frame: SdsFrame, variable: str, top_threshold: float) -> float:
    if variable == "size":
        return frame.size_median
    if variable == "productivity":
        return frame.productivity_median
    if variable == "top_share":
        return top_threshold
    if variable == "inactive_share":
        return frame.inactive_share_median
    raise ValueError(f"unknown variable {variable!r}; expected one of {VARIABLES}")


def dichotomize(frame: SdsFrame, variable: str, top_threshold: float = 0.20) -> dict[str, bool]:
    """Map each unit to True when its value sits at or below the threshold.

    True is the Small/Low class; values exactly at the threshold go there.
    """
    cut = _threshold(frame, variable, top_threshold)
    return {r.university_id: bool(getattr(r, variable) <= cut) for r in frame.units}


def contingency(frame: SdsFrame, var_a: str, var_b: str, top_threshold: float = 0.20) -> ContingencyTable2x2:
    """2x2 unit counts of var_a (rows, low/high) against var_b (cols)."""
    low_a = dichotomize(frame, var_a, top_threshold)
    low_b = dichotomize(frame, var_b, top_threshold)
    a = b = c = d = 0
    for r in frame.units:
        if low_a[r.university_id]:
            if low_b[r.university_id]:
                a += 1
            else:
                b += 1
        elif low_b[r.university_id]:
            c += 1
        else:
            d += 1
    return ContingencyTable2x2(a, b, c, d, row_variable=var_a, col_variable=var_b)


def write_frames(frames, path, top_threshold: float = 0.20) -> None:
    """Export all frames with their class labels to one CSV."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "sds_id",
                "university_id",
                "size",
                "productivity",
                "top_share",
                "inactive_share",
                "size_class",
                "prod_class",
                "top_class",
                "inactive_class",
            ]
        )
        for frame in sorted(frames, key=lambda f: f.sds_id):
            classes = {v: dichotomize(frame, v, top_threshold) for v in VARIABLES}
            for r in frame.units:
                writer.writerow(
                    [
                        frame.sds_id,
                        r.university_id,
                        f"{r.size:.6g}",
                        f"{r.productivity:.6g}",
                        f"{r.top_share:.6g}",
                        f"{r.inactive_share:.6g}",
                        "Small" if classes["size"][r.university_id] else "Large",
                        "Low" if classes["productivity"][r.university_id] else "High",
                        "Low" if classes["top_share"][r.university_id] else "High",
                        "Low" if classes["inactive_share"][r.university_id] else "High",
                    ]
                )
