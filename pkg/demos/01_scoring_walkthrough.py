"""
Scoring walkthrough
===================

Builds a tiny publication/roster dataset by hand and walks through the
scoring chain: citation baselines, byline credit weights, standardized
impact, and finally unit scores and productivity.

Run with: python demos/01_scoring_walkthrough.py
"""

from prodsize import (
    AuthorRef,
    Dataset,
    PublicationRecord,
    StaffRecord,
    author_weights,
    compute_baselines,
    compute_unit_scores,
    standardized_impact,
    unit_fraction,
)

###############################################################################
# A miniature world: two universities active in one field over 2004-2008.
# Three publications land in the same (year, category) cell so the cell
# median is meaningful; one is a life-science paper with a positional byline.

roster = [
    StaffRecord("anna", "U-A", "PHYS", {y: 1.0 for y in range(2004, 2009)}),
    StaffRecord("ben", "U-A", "PHYS", {y: 1.0 for y in range(2004, 2009)}),
    StaffRecord("carla", "U-B", "PHYS", {y: 0.5 for y in range(2004, 2009)}),
]

publications = [
    PublicationRecord(
        "pub-1", 2006, 24, ("optics",),
        (AuthorRef("anna", "U-A", "PHYS", 1), AuthorRef("ext-1", None, None, 2)),
    ),
    PublicationRecord(
        "pub-2", 2006, 12, ("optics",),
        (AuthorRef("carla", "U-B", "PHYS", 1),),
    ),
    PublicationRecord(
        "pub-3", 2006, 2, ("optics",),
        (AuthorRef("ben", "U-A", "PHYS", 1),),
    ),
    # a five-author life-science byline whose first and last share a university
    PublicationRecord(
        "pub-4", 2007, 30, ("biochem",),
        (
            AuthorRef("anna", "U-A", "PHYS", 1),
            AuthorRef("ext-2", None, None, 2),
            AuthorRef("ext-3", None, None, 3),
            AuthorRef("carla", "U-B", "PHYS", 4),
            AuthorRef("ben", "U-A", "PHYS", 5),
        ),
        life_science=True,
    ),
]

dataset = Dataset(publications, roster, period=(2004, 2008), category_lifesci=frozenset({"biochem"}))

###############################################################################
# Baselines: the median citation count per (year, category) cell.

baselines = compute_baselines(dataset)
for (year, cat), value in sorted(baselines.table.items()):
    n = baselines.source_counts[(year, cat)]
    print(f"baseline {year}/{cat}: {value} (from {n} publications, rule={baselines.fallback[(year, cat)]})")

###############################################################################
# Standardized impact divides citations by the cell baseline, making a
# biochemistry paper comparable to an optics one.

for pub in publications:
    print(f"{pub.pub_id}: citations={pub.citations:3d} standardized={standardized_impact(pub, baselines):.3f}")

###############################################################################
# Byline weights: equal shares outside the life sciences; position-based
# shares inside. pub-4 has first and last authors at the same university,
# so they take 40% each and the middle splits the rest.

w4 = author_weights(publications[3])
print("pub-4 weights:", {pos: round(w, 4) for pos, w in sorted(w4.weights.items())})
print("U-A fraction of pub-4:", unit_fraction(publications[3], w4, "U-A", "PHYS"))

###############################################################################
# Unit scores: fractional standardized citations, staff averages, and
# productivity. Carla works half-time, so U-B's staff average is 0.5.

for score in compute_unit_scores(dataset, baselines):
    print(
        f"unit ({score.university_id}, {score.sds_id}): fsc={score.fsc:.3f} "
        f"rs={score.rs:.2f} productivity={score.productivity:.3f} pubs={score.n_pubs}"
    )
