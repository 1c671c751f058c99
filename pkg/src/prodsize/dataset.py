"""Domain records and file ingestion for publication/citation/staff data.

The toolkit works from three inputs: a JSONL file of publications (one
object per line), a CSV roster of research staff with per-year employment
fractions, and a small TOML config declaring the observation period and
the set of subject categories counted as life science.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class DatasetError(ValueError):
    """Raised when an input file violates the ingestion schema."""


EXTERNAL = None  # affiliation marker for authors outside the surveyed universities


@dataclass(frozen=True, slots=True)
class AuthorRef:
    """One byline entry: who, where, and at which position (1-based)."""

    author_id: str
    university_id: str | None
    sds_id: str | None
    position: int

    @property
    def external(self) -> bool:
        return self.university_id is None


@dataclass(frozen=True, slots=True)
class PublicationRecord:
    pub_id: str
    year: int
    citations: int
    categories: tuple[str, ...]
    authors: tuple[AuthorRef, ...]
    life_science: bool = False


@dataclass(frozen=True, slots=True)
class StaffRecord:
    scientist_id: str
    university_id: str
    sds_id: str
    headcount_by_year: dict[int, float]


@dataclass(slots=True)
class Dataset:
    publications: list[PublicationRecord]
    roster: list[StaffRecord]
    period: tuple[int, int]  # inclusive year range
    category_lifesci: frozenset[str] = frozenset()

    def years(self) -> range:
        return range(self.period[0], self.period[1] + 1)

    def unit_universe(self) -> set[tuple[str, str]]:
        """All (university, sds) pairs present in the roster."""
        return {(s.university_id, s.sds_id) for s in self.roster}


@dataclass(slots=True)
class ValidationReport:
    orphaned_affiliations: list[tuple[str, str, str]] = field(default_factory=list)
    out_of_period: list[str] = field(default_factory=list)
    missing_baselines: list[tuple[int, str]] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not (self.orphaned_affiliations or self.out_of_period or self.missing_baselines)

    def issue_count(self) -> int:
        return len(self.orphaned_affiliations) + len(self.out_of_period) + len(self.missing_baselines)


def _author_from_obj(obj, pub_id, lineno):
    for key in ("author_id", "position"):
        if key not in obj:
            raise DatasetError(f"line {lineno}: author of {pub_id!r} missing field {key!r}")
    uni = obj.get("university_id")
    sds = obj.get("sds_id")
    if uni is None and sds is not None:
        raise DatasetError(f"line {lineno}: external author in {pub_id!r} must not carry sds_id")
    if uni is not None and sds is None:
        raise DatasetError(f"line {lineno}: author of {pub_id!r} has university_id but no sds_id")
    pos = obj["position"]
    if not isinstance(pos, int) or pos < 1:
        raise DatasetError(f"line {lineno}: field 'position' of {pub_id!r} must be a positive integer")
    return AuthorRef(str(obj["author_id"]), uni, sds, pos)


def load_publications(path, lifesci_categories=frozenset()) -> list[PublicationRecord]:
    """Parse a publications JSONL file, preserving byline order.

    The life_science flag is set iff any category belongs to
    `lifesci_categories`. Raises DatasetError naming the offending line
    and field on any schema violation.
    """
    lifesci = frozenset(lifesci_categories)
    records = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            for key in ("pub_id", "year", "citations", "categories", "authors"):
                if key not in obj:
                    raise DatasetError(f"line {lineno}: missing field {key!r}")
            pub_id = str(obj["pub_id"])
            if pub_id in seen:
                raise DatasetError(f"line {lineno}: duplicate pub_id {pub_id!r}")
            seen.add(pub_id)
            if not isinstance(obj["year"], int):
                raise DatasetError(f"line {lineno}: field 'year' must be an integer")
            citations = obj["citations"]
            if not isinstance(citations, int) or citations < 0:
                raise DatasetError(f"line {lineno}: field 'citations' must be a non-negative integer")
            categories = obj["categories"]
            if not categories:
                raise DatasetError(f"line {lineno}: field 'categories' must be non-empty")
            authors = [_author_from_obj(a, pub_id, lineno) for a in obj["authors"]]
            if not authors:
                raise DatasetError(f"line {lineno}: field 'authors' must be non-empty")
            positions = sorted(a.position for a in authors)
            if positions != list(range(1, len(authors) + 1)):
                raise DatasetError(f"line {lineno}: field 'authors' positions must form 1..{len(authors)}")
            cats = tuple(str(c) for c in categories)
            records.append(
                PublicationRecord(
                    pub_id=pub_id,
                    year=obj["year"],
                    citations=citations,
                    categories=cats,
                    authors=tuple(authors),
                    life_science=any(c in lifesci for c in cats),
                )
            )
    return records


def load_roster(path) -> list[StaffRecord]:
    """Parse the staff roster CSV, merging yearly rows per scientist."""
    by_scientist: dict[str, StaffRecord] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = ["scientist_id", "university_id", "sds_id", "year", "fraction"]
        if reader.fieldnames != expected:
            raise DatasetError(f"roster header must be {','.join(expected)}")
        for lineno, row in enumerate(reader, start=2):
            sid = row["scientist_id"]
            try:
                year = int(row["year"])
                fraction = float(row["fraction"])
            except ValueError as exc:
                raise DatasetError(f"line {lineno}: non-numeric year or fraction") from exc
            if not 0.0 <= fraction <= 1.0:
                raise DatasetError(f"line {lineno}: fraction {fraction} outside [0, 1]")
            rec = by_scientist.get(sid)
            if rec is None:
                by_scientist[sid] = StaffRecord(sid, row["university_id"], row["sds_id"], {year: fraction})
                continue
            if (rec.university_id, rec.sds_id) != (row["university_id"], row["sds_id"]):
                raise DatasetError(f"line {lineno}: scientist {sid!r} listed under two different units")
            if year in rec.headcount_by_year:
                raise DatasetError(f"line {lineno}: duplicate (scientist, year) pair ({sid!r}, {year})")
            rec.headcount_by_year[year] = fraction
    return list(by_scientist.values())


def load_config(path) -> dict:
    """Read the flat TOML config (period bounds, life-science categories, paths)."""
    with open(path, "rb") as fh:
        try:
            cfg = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise DatasetError(f"config {path}: {exc}") from exc
    for key in ("period_start", "period_end"):
        if key not in cfg:
            raise DatasetError(f"config {path}: missing key {key!r}")
    if cfg["period_start"] > cfg["period_end"]:
        raise DatasetError(f"config {path}: empty period")
    cfg.setdefault("life_science_categories", [])
    return cfg


def load_dataset(config_path) -> Dataset:
    """Load publications + roster as referenced by a config file."""
    config_path = Path(config_path)
    cfg = load_config(config_path)
    base = config_path.parent
    lifesci = frozenset(cfg["life_science_categories"])
    pubs = load_publications(base / cfg.get("publications", "publications.jsonl"), lifesci)
    roster = load_roster(base / cfg.get("roster", "roster.csv"))
    return Dataset(pubs, roster, (cfg["period_start"], cfg["period_end"]), lifesci)


def save_publications(publications, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pub in publications:
            obj = {
                "pub_id": pub.pub_id,
                "year": pub.year,
                "citations": pub.citations,
                "categories": list(pub.categories),
                "authors": [
                    {
                        "author_id": a.author_id,
                        "university_id": a.university_id,
                        "sds_id": a.sds_id,
                        "position": a.position,
                    }
                    for a in pub.authors
                ],
            }
            fh.write(json.dumps(obj) + "\n")


def save_roster(roster, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scientist_id", "university_id", "sds_id", "year", "fraction"])
        for rec in roster:
            for year in sorted(rec.headcount_by_year):
                writer.writerow([rec.scientist_id, rec.university_id, rec.sds_id, year, rec.headcount_by_year[year]])


def save_config(path, period, lifesci_categories, extra=None) -> None:
    """Write the flat TOML config understood by load_config."""
    lines = [f"period_start = {period[0]}", f"period_end = {period[1]}"]
    cats = ", ".join(f'"{c}"' for c in sorted(lifesci_categories))
    lines.append(f"life_science_categories = [{cats}]")
    for key, value in (extra or {}).items():
        if isinstance(value, str):
            lines.append(f'{key} = "{value}"')
        else:
            lines.append(f"{key} = {value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def validate(dataset: Dataset, baselines=None) -> ValidationReport:
    """Report consistency issues without mutating anything.

    With `baselines` given, also lists (year, category) cells used by some
    publication but absent from the baseline table.
    """
    report = ValidationReport()
    units = dataset.unit_universe()
    lo, hi = dataset.period
    for pub in dataset.publications:
        if not lo <= pub.year <= hi:
            report.out_of_period.append(pub.pub_id)
        for author in pub.authors:
            if author.external:
                continue
            if (author.university_id, author.sds_id) not in units:
                report.orphaned_affiliations.append((pub.pub_id, author.university_id, author.sds_id))
        if baselines is not None:
            for cat in pub.categories:
                if (pub.year, cat) not in baselines.table:
                    report.missing_baselines.append((pub.year, cat))
    return report


def average_research_staff(dataset: Dataset, university, sds) -> float:
    """Average yearly staff presence of a unit over the observation period.

    Sums each scientist's per-year employment fractions inside the period
    and divides by the number of years. Unknown units yield 0.0 with a
    warning.
    """
    years = dataset.years()
    n_years = len(years)
    total = 0.0
    known = False
    for rec in dataset.roster:
        if (rec.university_id, rec.sds_id) != (university, sds):
            continue
        known = True
        total += sum(rec.headcount_by_year.get(y, 0.0) for y in years)
    if not known:
        warnings.warn(f"unit ({university!r}, {sds!r}) not present in roster; RS = 0", stacklevel=2)
        return 0.0
    return total / n_years


def staff_presence_table(dataset: Dataset) -> dict[tuple[str, str], float]:
    """Average research staff for every unit in the roster, in one pass."""
    years = dataset.years()
    n_years = len(years)
    table: dict[tuple[str, str], float] = {}
    for rec in dataset.roster:
        key = (rec.university_id, rec.sds_id)
        table[key] = table.get(key, 0.0) + sum(rec.headcount_by_year.get(y, 0.0) for y in years)
    return {key: v / n_years for key, v in table.items()}
