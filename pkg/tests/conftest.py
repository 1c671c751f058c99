"""Shared fixture builders for engineered analysis worlds."""

import numpy as np
import pytest

from prodsize.classify import SdsFrame, UnitRow
from prodsize.dataset import AuthorRef, Dataset, PublicationRecord, StaffRecord


def frame_from_arrays(sizes, prods, tops=None, inactives=None, sds="S1"):
    n = len(sizes)
    tops = tops if tops is not None else [0.0] * n
    inactives = inactives if inactives is not None else [0.0] * n
    rows = [UnitRow(f"U{i:02d}", float(sizes[i]), float(prods[i]), tops[i], inactives[i]) for i in range(n)]
    frame = SdsFrame(sds, rows)
    frame.size_median = float(np.median(sizes))
    frame.productivity_median = float(np.median(prods))
    frame.inactive_share_median = float(np.median(inactives))
    return frame


def build_concordant_world(sds="SDS1"):
    """One 48-unit field whose productivity splits against size as (15, 9, 9, 15).

    Every unit has four scientists publishing one sole-authored paper each;
    unit staff averages vary through employment fractions. Exactly 38
    citation-carrying scientists sit strictly above the top percentile, 19
    in each size class, so neither quality screen can fire: productivity
    dichotomizes to the target table with tau_b = +0.25 while the top and
    inactive tables stay balanced.
    """
    n_units = 48
    rs = np.round(np.linspace(0.6, 3.9, n_units), 2)
    size_small = rs <= np.median(rs)
    low_t = np.round(np.linspace(1.00, 1.47, 24), 3)
    high_t = np.round(np.linspace(1.53, 2.00, 24), 3)
    t = np.empty(n_units)
    small_idx = np.flatnonzero(size_small)
    large_idx = np.flatnonzero(~size_small)
    t[small_idx[:15]] = low_t[:15]
    t[small_idx[15:]] = high_t[:9]
    t[large_idx[:9]] = low_t[15:]
    t[large_idx[9:]] = high_t[9:]
    totals = t * rs * 1000.0

    carriers = set()
    for cls_idx in (small_idx, large_idx):
        order = sorted(cls_idx, key=lambda i: totals[i], reverse=True)
        carriers.update(order[:19])
    ceiling = max(totals[i] / 4.0 for i in range(n_units) if i not in carriers)
    pubs, roster = [], []
    pid = 0
    for i in range(n_units):
        uni = f"U{i:02d}"
        fraction = rs[i] / 4.0
        if i in carriers:
            v0 = ceiling * 1.10 + i
            companion = min((totals[i] - v0) / 3.0, 0.98 * ceiling - 0.5 * i)
            carrier_value = totals[i] - 3.0 * companion
            assert 0.0 < companion <= ceiling and carrier_value > ceiling * 1.05
            cites = [carrier_value, companion, companion, companion]
        else:
            cites = [totals[i] / 4.0] * 4
        for k in range(4):
            sid = f"{uni}-{k}"
            roster.append(StaffRecord(sid, uni, sds, {y: fraction for y in range(2004, 2009)}))
            pubs.append(
                PublicationRecord(
                    pub_id=f"P{pid:04d}",
                    year=2006,
                    citations=int(round(cites[k])),
                    categories=("CAT",),
                    authors=(AuthorRef(sid, uni, sds, 1),),
                )
            )
            pid += 1
    return Dataset(pubs, roster, (2004, 2008), frozenset())


def outlier_flip_points():
    """Size-productivity cloud with an upward trend masked by three planted
    high-leverage outliers at small sizes; removal flips the curve verdict."""
    rng = np.random.default_rng(14)
    n = 30
    x = np.geomspace(2.0, 30.0, n)
    y = 1.0 + 0.02 * x + rng.normal(0.0, 0.15, n)
    planted = (2, 4, 6)
    for i in planted:
        y[i] += 2.0
    return list(zip(x, y)), set(planted)


@pytest.fixture
def concordant_world():
    return build_concordant_world()
