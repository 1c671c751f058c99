"""Synthetic publication worlds with a planted returns-to-size exponent.

Unit output is modeled as expected-FSC proportional to a * RS^beta, so
per-capita productivity scales as RS^(beta-1): beta = 1 plants constant
returns, beta > 1 increasing returns. A coupling parameter rho ties
latent scientist quality to unit size, planting exactly the confound the
quality screen is meant to catch. Citation counts come from a heavy-tailed
negative-binomial draw so the median-based standardization (including its
zero-median fallback) gets exercised.

Because a unit's score is the sum of its members' scores, scaling output
uniformly per capita would register as top-scientist concentration and the
quality screen would (correctly) exclude every planted field. Worlds meant
to exercise detection therefore set star_prob > 0: a fixed share of
scientists per unit carry a large intrinsic multiplier and publish at a
size-independent rate, saturating the top quintile, while beta scales the
rank-and-file rate that unit-level means still pick up.

Coauthors beyond an optional single same-unit colleague are external,
keeping the expected byline fraction of a unit independent of its size;
otherwise collaboration structure would itself induce spurious returns.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import AuthorRef, Dataset, PublicationRecord, StaffRecord, save_config, save_publications, save_roster

UDA_COUNT = 9  # disciplines to spread fields across, mirroring hard-science areas


@dataclass(slots=True)
class WorldConfig:
    n_sds: int = 40
    n_universities: int = 40
    size_log_mean: float = 1.7
    size_log_sigma: float = 0.5
    size_min: int = 4  # smaller raw draws leave the university inactive in the field
    size_max: int = 40
    beta_default: float = 1.0
    beta_overrides: dict[str, float] = field(default_factory=dict)
    rho: float = 0.0  # correlation between unit size and planted scientist quality
    quality_sigma: float = 0.3
    star_prob: float = 0.0  # share of scientists with a large intrinsic output multiplier
    star_mult: float = 5.0
    inactive_prob: float = 0.0  # share of scientists who publish nothing regardless of unit
    deterministic_counts: bool = False  # quantize output instead of Poisson draws
    pubs_per_capita: float = 3.5  # expected publications per scientist over the period
    coauthor_mean: float = 1.5
    internal_pair_prob: float = 0.2
    citation_mean: float = 6.0
    citation_dispersion: float = 4.0  # negative-binomial r; smaller is heavier-tailed
    multi_category_prob: float = 0.25
    life_science_share: float = 0.33
    staggered_entry_prob: float = 0.15
    period: tuple[int, int] = (2004, 2008)
    seed: int = 0

    def __post_init__(self):
        if self.n_sds < 1 or self.n_universities < 1:
            raise ValueError("need at least one SDS and one university")
        if self.beta_default <= 0 or any(b <= 0 for b in self.beta_overrides.values()):
            raise ValueError("returns exponent beta must be positive")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")
        if not 1 <= self.size_min <= self.size_max:
            raise ValueError("need 1 <= size_min <= size_max")
        if self.period[0] > self.period[1]:
            raise ValueError("empty period")


@dataclass(slots=True)
class GroundTruth:
    beta_by_sds: dict[str, float] = field(default_factory=dict)
    quality_decile: dict[str, int] = field(default_factory=dict)
    uda_map: dict[str, str] = field(default_factory=dict)
    seed: int = 0
    rho: float = 0.0


def sds_name(index: int) -> str:
    return f"S{index:03d}"


def _sds_rng(seed: int, index: int) -> np.random.Generator:
    # counter-indexed substream: field i draws from its own slice of one Philox key
    return np.random.Generator(np.random.Philox(key=seed, counter=(index + 1) << 128))


def _negative_binomial(rng, mean: float, dispersion: float, size: int) -> np.ndarray:
    p = dispersion / (dispersion + mean)
    return rng.negative_binomial(dispersion, p, size=size)


def generate_world(config: WorldConfig) -> tuple[Dataset, GroundTruth]:
    """Draw a full synthetic dataset plus the planted ground truth.

    Deterministic for a given config: each field consumes an independent
    counter-indexed substream of the master seed.
    """
    years = list(range(config.period[0], config.period[1] + 1))
    n_years = len(years)
    n_lifesci = round(config.life_science_share * config.n_sds)
    publications: list[PublicationRecord] = []
    roster: list[StaffRecord] = []
    truth = GroundTruth(seed=config.seed, rho=config.rho)
    lifesci_categories: set[str] = set()

    for sds_index in range(config.n_sds):
        sds = sds_name(sds_index)
        rng = _sds_rng(config.seed, sds_index)
        beta = config.beta_overrides.get(sds, config.beta_default)
        truth.beta_by_sds[sds] = beta
        truth.uda_map[sds] = f"UDA{1 + sds_index % UDA_COUNT}"
        life_science = sds_index < n_lifesci
        categories = (f"{sds}-A", f"{sds}-B")
        if life_science:
            lifesci_categories.update(categories)

        raw_sizes = rng.lognormal(config.size_log_mean, config.size_log_sigma, config.n_universities)
        sizes = np.minimum(np.rint(raw_sizes).astype(int), config.size_max)
        sizes[sizes < config.size_min] = 0  # university inactive in this field

        ext_counter = 0
        pub_counter = 0
        sds_scientists: list[tuple[str, float]] = []
        for uni_index, size in enumerate(sizes):
            if size == 0:
                continue
            university = f"U{uni_index:03d}"
            z_size = (math.log(size) - config.size_log_mean) / config.size_log_sigma
            noise = rng.standard_normal(size)
            quality = np.exp(
                config.quality_sigma * (config.rho * z_size + math.sqrt(1.0 - config.rho**2) * noise)
            )
            star_mask = np.zeros(size, dtype=bool)
            if config.star_prob > 0.0:
                # stratified allocation: stars spread evenly across unit sizes, so
                # planted returns cannot masquerade as quality concentration
                target = config.star_prob * size
                n_stars = int(target) + (1 if rng.random() < target - int(target) else 0)
                star_mask[rng.choice(size, size=min(n_stars, size), replace=False)] = True
                quality[star_mask] *= config.star_mult
            unit_ids = [f"{sds}:{university}:{k}" for k in range(size)]

            presence = np.ones((size, n_years))
            staggered = rng.random(size) < config.staggered_entry_prob
            for i in np.flatnonzero(staggered):
                join = int(rng.integers(1, n_years))
                presence[i, :join] = 0.0
                presence[i, join] = 0.5
            for i, sid in enumerate(unit_ids):
                roster.append(
                    StaffRecord(sid, university, sds, {y: presence[i, j] for j, y in enumerate(years)})
                )
                sds_scientists.append((sid, float(quality[i])))

            share = presence.mean(axis=1)
            # returns to size act on rank-and-file output; intrinsic stars publish
            # at their own size-independent rate, keeping the top tail flat in size
            scaling = np.where(star_mask, 1.0, size ** (beta - 1.0))
            rate = config.pubs_per_capita * scaling * quality * share
            if config.deterministic_counts:
                whole = np.floor(rate).astype(int)
                pub_counts = whole + (rng.random(size) < rate - whole)
            else:
                pub_counts = rng.poisson(rate)
            if config.inactive_prob > 0.0:
                # intrinsic inactivity among the rank and file, stratified across
                # units like the stars; everyone active publishes at least once
                ranks = np.flatnonzero(~star_mask)
                target = config.inactive_prob * size
                n_inactive = int(target) + (1 if rng.random() < target - int(target) else 0)
                inactive = rng.choice(ranks, size=min(n_inactive, ranks.size), replace=False)
                pub_counts = np.maximum(pub_counts, 1)
                pub_counts[inactive] = 0
            for i, n_pubs in enumerate(pub_counts):
                focal = unit_ids[i]
                year_weights = presence[i] / presence[i].sum()
                for _ in range(n_pubs):
                    byline = 1 + int(rng.poisson(config.coauthor_mean))
                    byline = min(byline, 12)
                    members = [focal]
                    if byline >= 2 and size >= 2 and rng.random() < config.internal_pair_prob:
                        colleague = int(rng.integers(0, size - 1))
                        if colleague >= i:
                            colleague += 1
                        members.append(unit_ids[colleague])
                    while len(members) < byline:
                        members.append(f"EXT:{sds}:{ext_counter}")
                        ext_counter += 1
                    order = rng.permutation(len(members))
                    authors = [None] * len(members)
                    for pos0, member_idx in enumerate(order):
                        member = members[member_idx]
                        if member.startswith("EXT:"):
                            authors[pos0] = AuthorRef(member, None, None, pos0 + 1)
                        else:
                            authors[pos0] = AuthorRef(member, university, sds, pos0 + 1)
                    cats = [categories[0]] if rng.random() < 0.7 else [categories[1]]
                    if rng.random() < config.multi_category_prob:
                        cats = list(categories)
                    year = int(rng.choice(len(years), p=year_weights))
                    citations = int(_negative_binomial(rng, config.citation_mean, config.citation_dispersion, 1)[0])
                    publications.append(
                        PublicationRecord(
                            pub_id=f"{sds}:P{pub_counter:06d}",
                            year=years[year],
                            citations=citations,
                            categories=tuple(cats),
                            authors=tuple(authors),
                            life_science=life_science,
                        )
                    )
                    pub_counter += 1

        ranked = sorted(sds_scientists, key=lambda t: (t[1], t[0]))
        for rank, (sid, _q) in enumerate(ranked):
            truth.quality_decile[sid] = min(9, 10 * rank // max(len(ranked), 1))

    dataset = Dataset(publications, roster, config.period, frozenset(lifesci_categories))
    return dataset, truth


def world_to_files(dataset: Dataset, out_dir, ground_truth: GroundTruth | None = None) -> dict[str, Path]:
    """Write a generated world in the ingestion schemas; round-trip safe."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "publications": out / "publications.jsonl",
        "roster": out / "roster.csv",
        "config": out / "config.toml",
    }
    save_publications(dataset.publications, paths["publications"])
    save_roster(dataset.roster, paths["roster"])
    extra = {"publications": "publications.jsonl", "roster": "roster.csv"}
    if ground_truth is not None:
        extra["uda_map"] = "sds_uda.csv"
    save_config(paths["config"], dataset.period, dataset.category_lifesci, extra)
    if ground_truth is not None:
        paths["uda_map"] = out / "sds_uda.csv"
        with open(paths["uda_map"], "w", encoding="utf-8") as fh:
            fh.write("sds_id,uda_id\n")
            for sds in sorted(ground_truth.uda_map):
                fh.write(f"{sds},{ground_truth.uda_map[sds]}\n")
        paths["ground_truth"] = out / "ground_truth.json"
        with open(paths["ground_truth"], "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "seed": ground_truth.seed,
                    "rho": ground_truth.rho,
                    "beta_by_sds": ground_truth.beta_by_sds,
                    "quality_decile": ground_truth.quality_decile,
                    "uda_map": ground_truth.uda_map,
                },
                fh,
                indent=2,
                sort_keys=True,
            )
    return paths
