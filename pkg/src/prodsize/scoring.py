"""Citation standardization and fractional credit attribution.

A publication's impact is its citation count divided by the median
citations of all publications of the same year and subject category
(medians rather than means because citation counts are heavily skewed).
Impact is then split across the byline: equally outside the life
sciences, by byline position inside them. Summing each unit's fractions
of standardized impact gives its fractional standardized citation score,
and dividing by average staff gives productivity.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

from .dataset import Dataset, PublicationRecord, staff_presence_table


class BaselineError(KeyError):
    """A publication references a (year, category) cell with no baseline."""


@dataclass(slots=True)
class Baselines:
    """Scaling value per (year, category) cell.

    Each cell holds the median citation count of the publications in it.
    Cells whose median is 0 fall back to the cell mean, and to 1.0 if the
    mean is also 0; `fallback` records which rule produced the value.
    """

    table: dict[tuple[int, str], float] = field(default_factory=dict)
    source_counts: dict[tuple[int, str], int] = field(default_factory=dict)
    fallback: dict[tuple[int, str], str] = field(default_factory=dict)

    def value(self, year: int, category: str) -> float:
        try:
            return self.table[(year, category)]
        except KeyError:
            raise BaselineError(f"no baseline for year {year}, category {category!r}") from None


@dataclass(frozen=True, slots=True)
class AuthorWeights:
    pub_id: str
    weights: dict[int, float]  # byline position -> share of credit


@dataclass(slots=True)
class UnitScore:
    university_id: str
    sds_id: str
    fsc: float
    rs: float
    productivity: float  # nan when rs == 0
    n_pubs: int

    @property
    def defined(self) -> bool:
        return self.rs > 0.0


@dataclass(slots=True)
class ScientistScore:
    scientist_id: str
    university_id: str
    sds_id: str
    fsc: float


def _median(values) -> float:
    s = sorted(values)
    n = len(s)
    mid = n // 2
    if n % 2:
        return float(s[mid])
    return (s[mid - 1] + s[mid]) / 2.0


def compute_baselines(dataset: Dataset) -> Baselines:
    """Median citations per (year, category) cell, with zero-median fallback.

    A publication with k categories contributes its citation count to each
    of its k cells.
    """
    cells: dict[tuple[int, str], list[int]] = {}
    for pub in dataset.publications:
        for cat in pub.categories:
            cells.setdefault((pub.year, cat), []).append(pub.citations)
    base = Baselines()
    for key, counts in cells.items():
        value = _median(counts)
        rule = "median"
        if value == 0.0:
            value = sum(counts) / len(counts)
            rule = "mean"
            if value == 0.0:
                value = 1.0
                rule = "one"
        base.table[key] = value
        base.source_counts[key] = len(counts)
        base.fallback[key] = rule
    return base


def standardized_impact(pub: PublicationRecord, baselines: Baselines) -> float:
    """Citations scaled by the mean of the publication's category baselines."""
    scale = sum(baselines.value(pub.year, c) for c in pub.categories) / len(pub.categories)
    return pub.citations / scale


def author_weights(pub: PublicationRecord) -> AuthorWeights:
    """Split one unit of credit across the byline.

    Outside the life sciences every author gets 1/N. In the life sciences
    byline position matters: when first and last author share a university
    they take 40% each and the others split the remaining 20%; otherwise
    first and last take 30% each, second and second-to-last 15% each, and
    the rest split the remaining 10%. Bylines too short for distinct
    positions collapse the shares (N=1 -> 1; N=2 -> 0.5 each;
    N=3 -> 0.40/0.20/0.40 or 0.30/0.40/0.30; N=4 split -> 0.30/0.20/0.20/0.30).
    """
    n = len(pub.authors)
    if n == 1:
        return AuthorWeights(pub.pub_id, {pub.authors[0].position: 1.0})
    if not pub.life_science:
        w = 1.0 / n
        return AuthorWeights(pub.pub_id, {a.position: w for a in pub.authors})
    if n == 2:
        return AuthorWeights(pub.pub_id, {1: 0.5, 2: 0.5})

    first_uni = pub.authors[0].university_id
    last_uni = pub.authors[-1].university_id
    shared = first_uni is not None and first_uni == last_uni

    weights = {}
    if shared:
        middle = 0.20 / (n - 2)
        for pos in range(2, n):
            weights[pos] = middle
        weights[1] = 0.40
        weights[n] = 0.40
    elif n == 3:
        weights = {1: 0.30, 2: 0.40, 3: 0.30}
    elif n == 4:
        weights = {1: 0.30, 2: 0.20, 3: 0.20, 4: 0.30}
    else:
        rest = 0.10 / (n - 4)
        for pos in range(3, n - 1):
            weights[pos] = rest
        weights[1] = 0.30
        weights[n] = 0.30
        weights[2] = 0.15
        weights[n - 1] = 0.15
    return AuthorWeights(pub.pub_id, weights)


def unit_fraction(pub: PublicationRecord, weights: AuthorWeights, university, sds) -> float:
    """Total byline weight held by authors of one (university, sds) unit."""
    return sum(
        weights.weights[a.position]
        for a in pub.authors
        if a.university_id == university and a.sds_id == sds
    )


def compute_unit_scores(dataset: Dataset, baselines: Baselines) -> list[UnitScore]:
    """Score every unit with roster presence or publication attribution.

    fsc sums standardized impact times the unit's byline fraction over all
    publications; productivity is fsc / average staff, flagged undefined
    (nan) for units with no staff in the period.
    """
    rs_table = staff_presence_table(dataset)
    fsc: dict[tuple[str, str], float] = {key: 0.0 for key in rs_table}
    n_pubs: dict[tuple[str, str], int] = {key: 0 for key in rs_table}
    for pub in dataset.publications:
        impact = standardized_impact(pub, baselines)
        weights = author_weights(pub)
        fractions: dict[tuple[str, str], float] = {}
        for a in pub.authors:
            if a.external:
                continue
            key = (a.university_id, a.sds_id)
            fractions[key] = fractions.get(key, 0.0) + weights.weights[a.position]
        for key, frac in fractions.items():
            if frac <= 0.0:
                continue
            fsc[key] = fsc.get(key, 0.0) + impact * frac
            n_pubs[key] = n_pubs.get(key, 0) + 1
    scores = []
    for key in sorted(fsc):
        uni, sds = key
        rs = rs_table.get(key, 0.0)
        f = fsc[key]
        productivity = f / rs if rs > 0.0 else math.nan
        scores.append(UnitScore(uni, sds, f, rs, productivity, n_pubs.get(key, 0)))
    return scores


def compute_scientist_scores(dataset: Dataset, baselines: Baselines) -> list[ScientistScore]:
    """Individual fractional standardized citations for every roster member.

    A scientist's score sums, over the publications they author, the
    standardized impact times their own byline weight. Roster members with
    no publications score 0 (the inactive case).
    """
    acc: dict[str, float] = {rec.scientist_id: 0.0 for rec in dataset.roster}
    for pub in dataset.publications:
        impact = None
        weights = None
        for a in pub.authors:
            if a.author_id not in acc:
                continue
            if impact is None:
                impact = standardized_impact(pub, baselines)
                weights = author_weights(pub)
            acc[a.author_id] += impact * weights.weights[a.position]
    return [
        ScientistScore(rec.scientist_id, rec.university_id, rec.sds_id, acc[rec.scientist_id])
        for rec in dataset.roster
    ]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def write_unit_scores(scores, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["university_id", "sds_id", "fsc", "rs", "productivity", "n_pubs"])
        for s in sorted(scores, key=lambda s: (s.sds_id, s.university_id)):
            writer.writerow([s.university_id, s.sds_id, _fmt(s.fsc), _fmt(s.rs), _fmt(s.productivity), s.n_pubs])


def write_scientist_scores(scores, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scientist_id", "university_id", "sds_id", "fsc"])
        for s in sorted(scores, key=lambda s: (s.sds_id, s.university_id, s.scientist_id)):
            writer.writerow([s.scientist_id, s.university_id, s.sds_id, _fmt(s.fsc)])


def write_baselines(baselines: Baselines, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["year", "category", "value", "fallback_used", "n_pubs"])
        for (year, cat) in sorted(baselines.table):
            writer.writerow(
                [
                    year,
                    cat,
                    _fmt(baselines.table[(year, cat)]),
                    baselines.fallback[(year, cat)],
                    baselines.source_counts[(year, cat)],
                ]
            )


def read_baselines(path) -> Baselines:
    base = Baselines()
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            key = (int(row["year"]), row["category"])
            base.table[key] = float(row["value"])
            base.fallback[key] = row["fallback_used"]
            base.source_counts[key] = int(row["n_pubs"])
    return base
