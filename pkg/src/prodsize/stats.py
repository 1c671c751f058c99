"""Statistics kernel: G-test, Kendall tau-b, permutation test, LOESS.

Everything here is a pure function of its arguments. The permutation test
draws each permutation from its own counter-indexed slice of a Philox
stream, so results are reproducible for a given seed no matter how the
surrounding pipeline schedules work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classify import ContingencyTable2x2


@dataclass(slots=True)
class AssociationResult:
    """Outcome of one dependence analysis on a 2x2 table."""

    g_statistic: float = 0.0
    p_value: float = 1.0
    tau_b: float = 0.0
    significant: bool = False
    degenerate: bool = False  # a zero margin made the test uninformative
    not_run: bool = False  # too few units to attempt the test


@dataclass(frozen=True, slots=True)
class BoxStats:
    q1: float
    median: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    outliers: tuple[float, ...]


@dataclass(slots=True)
class QuartileGroups:
    """Productivity values split into four groups by unit size."""

    groups: tuple[np.ndarray, ...]
    boxstats: tuple[BoxStats, ...]
    size_bounds: tuple[float, ...] = ()  # max size per group


@dataclass(slots=True)
class LoessFit:
    """Locally weighted regression of y on x at the retained input points."""

    span: float
    degree: int
    x: np.ndarray  # all input points, original order
    y: np.ndarray
    excluded: frozenset[int] = frozenset()
    included_idx: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))
    fitted: np.ndarray = field(default_factory=lambda: np.empty(0))

    def residuals(self) -> np.ndarray:
        return self.y[self.included_idx] - self.fitted

    def predict(self, x0: float) -> float:
        """Evaluate the local fit at an arbitrary location."""
        return _local_fit(self.x[self.included_idx], self.y[self.included_idx], x0, self.span, self.degree)


def chi_square_sf(x: float, df: int = 1) -> float:
    """Upper-tail probability of the chi-square distribution with 1 df.

    For one degree of freedom the survival function reduces to
    erfc(sqrt(x/2)), accurate to well below 1e-8 over the tested range.
    """
    if x < 0:
        raise ValueError("chi-square statistic must be non-negative")
    if df != 1:
        raise ValueError("only 1 degree of freedom is supported")
    return math.erfc(math.sqrt(x / 2.0))


def g_test(table: ContingencyTable2x2, williams: bool = False) -> tuple[float, float]:
    """Likelihood-ratio test of independence on a 2x2 table.

    Returns (G, p) with G = 2 * sum O*ln(O/E) (empty cells contribute 0)
    and p from the 1-df chi-square survival function. Tables with a zero
    row or column margin are degenerate: (0, 1). The Williams small-sample
    correction is off by default; pass williams=True to divide G by the
    correction factor.
    """
    (r1, r2), (c1, c2) = table.margins()
    if min(r1, r2, c1, c2) == 0:
        return 0.0, 1.0
    observed = (table.a, table.b, table.c, table.d)
    g = 2.0 * sum(o * math.log(o / e) for o, e in zip(observed, table.expected()) if o > 0)
    g = max(g, 0.0)  # rounding can produce a tiny negative for O == E
    if williams:
        n = table.n
        q = 1.0 + ((n / r1 + n / r2 - 1.0) * (n / c1 + n / c2 - 1.0)) / (6.0 * n)
        g /= q
    return g, chi_square_sf(g)


def kendall_tau_b_2x2(table: ContingencyTable2x2) -> float:
    """Concordance coefficient (ad - bc) / sqrt of the margin product.

    Zero when any margin is empty (degenerate table).
    """
    (r1, r2), (c1, c2) = table.margins()
    denom = r1 * r2 * c1 * c2
    if denom == 0:
        return 0.0
    return (table.a * table.d - table.b * table.c) / math.sqrt(denom)


def _box_stats(values: np.ndarray) -> BoxStats:
    q1, med, q3 = np.percentile(values, [25.0, 50.0, 75.0])
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    inside = values[(values >= lo_fence) & (values <= hi_fence)]
    outliers = values[(values < lo_fence) | (values > hi_fence)]
    return BoxStats(
        q1=float(q1),
        median=float(med),
        q3=float(q3),
        whisker_lo=float(inside.min()),
        whisker_hi=float(inside.max()),
        outliers=tuple(float(v) for v in np.sort(outliers)),
    )


def quartile_split(units) -> QuartileGroups:
    """Split (size, productivity) pairs into four size quartiles.

    Units are sorted by size and cut into contiguous groups as equal as
    possible, any remainder going to the lower quartiles. Box statistics
    use Tukey fences at 1.5 IQR.
    """
    pairs = sorted(units, key=lambda p: p[0])
    n = len(pairs)
    if n < 4:
        raise ValueError(f"need at least 4 units to form quartiles, got {n}")
    base, extra = divmod(n, 4)
    sizes = [base + (1 if i < extra else 0) for i in range(4)]
    groups = []
    bounds = []
    start = 0
    for size in sizes:
        chunk = pairs[start : start + size]
        groups.append(np.array([p[1] for p in chunk], dtype=float))
        bounds.append(float(chunk[-1][0]))
        start += size
    return QuartileGroups(
        groups=tuple(groups),
        boxstats=tuple(_box_stats(g) for g in groups),
        size_bounds=tuple(bounds),
    )


def _group_dispersion(sums: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    # sum over groups of S_g^2 / n_g; equal to the between-group dispersion
    # statistic up to the constant n * grand_mean^2, which permutations preserve
    return (sums * sums / sizes).sum(axis=-1)


def npc_test(groups: QuartileGroups, n_permutations: int = 999, seed: int = 0) -> float:
    """Permutation test of equal mean productivity across the size groups.

    The statistic is the between-group dispersion sum n_g*(mean_g - grand)^2;
    permutations shuffle values across groups keeping group sizes. The
    returned p uses the add-one estimator (1 + worse) / (1 + permutations),
    so it is never exactly 0. All-equal inputs return 1.
    """
    arrays = [np.asarray(g, dtype=float) for g in groups.groups if len(g)]
    values = np.concatenate(arrays) if arrays else np.empty(0)
    if values.size and np.ptp(values) == 0.0:
        return 1.0
    if len(arrays) < 2:
        raise ValueError("need at least 2 non-empty groups")
    if n_permutations < 999:
        raise ValueError("need at least 999 permutations")
    sizes = np.array([len(g) for g in arrays], dtype=float)
    offsets = np.concatenate(([0], np.cumsum(sizes.astype(int))[:-1]))
    observed_sums = np.array([g.sum() for g in arrays])
    observed = _group_dispersion(observed_sums, sizes)

    # one counter-based stream; permutation i consumes the i-th block of n draws.
    # Permuting the sorted pool makes the sampled p independent of input order,
    # so relabeling equal-sized groups cannot change the result.
    rng = np.random.Generator(np.random.Philox(key=seed))
    n = values.size
    draws = rng.random((n_permutations, n))
    order = np.argsort(draws, axis=1)
    permuted = np.sort(values)[order]
    sums = np.add.reduceat(permuted, offsets, axis=1)
    stats = _group_dispersion(sums, sizes)
    worse = int((stats >= observed).sum())
    return (1 + worse) / (1 + n_permutations)


def _local_fit(x: np.ndarray, y: np.ndarray, x0: float, span: float, degree: int) -> float:
    n = x.size
    k = min(int(math.ceil(span * n)), n)
    d = np.abs(x - x0)
    dk = np.partition(d, k - 1)[k - 1]
    mask = d <= dk  # distance ties are all kept
    xm, ym, dm = x[mask], y[mask], d[mask]
    dmax = dm.max()
    if dmax == 0.0:
        return float(ym.mean())
    u = dm / dmax
    w = (1.0 - u**3) ** 3
    t = xm - x0  # center for conditioning; the intercept is the fitted value
    if degree == 1:
        sw = w.sum()
        swt = (w * t).sum()
        swtt = (w * t * t).sum()
        swy = (w * ym).sum()
        swty = (w * t * ym).sum()
        det = sw * swtt - swt * swt
        if abs(det) <= 1e-12 * max(sw * swtt, swt * swt, 1e-300):
            return float(swy / sw)
        return float((swtt * swy - swt * swty) / det)
    # general degree via weighted normal equations
    design = np.vander(t, degree + 1, increasing=True)
    sw = np.sqrt(w)
    a = design * sw[:, None]
    b = ym * sw
    ata = a.T @ a
    if np.linalg.matrix_rank(ata) < degree + 1:
        return float((w * ym).sum() / w.sum())
    beta = np.linalg.solve(ata, a.T @ b)
    return float(beta[0])


def loess_fit(points, span: float = 0.75, degree: int = 1, exclude=frozenset()) -> LoessFit:
    """Tricube-weighted local polynomial regression at every retained point.

    Each fitted value comes from a weighted least-squares polynomial over
    the ceil(span*n) nearest neighbors (distance ties included), weighted
    by (1 - (d/dmax)^3)^3. Points listed in `exclude` (indices into
    `points`) take no part in the fit. Fits where the local system is
    singular fall back to the weighted mean.
    """
    pts = list(points)
    x = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts], dtype=float)
    if not 0.0 < span <= 1.0:
        raise ValueError("span must lie in (0, 1]")
    if degree not in (1, 2):
        raise ValueError("degree must be 1 or 2")
    excluded = frozenset(exclude)
    included_idx = np.array([i for i in range(len(pts)) if i not in excluded], dtype=int)
    n = included_idx.size
    if n < max(4, degree + 2):
        raise ValueError(f"need at least {max(4, degree + 2)} points, got {n}")
    xi, yi = x[included_idx], y[included_idx]
    fitted = np.array([_local_fit(xi, yi, x0, span, degree) for x0 in xi])
    return LoessFit(
        span=span,
        degree=degree,
        x=x,
        y=y,
        excluded=excluded,
        included_idx=included_idx,
        fitted=fitted,
    )


def detect_outliers_residual(fit: LoessFit, k: float = 3.0) -> frozenset[int]:
    """Indices of points whose |residual| exceeds k robust standard deviations.

    The scale is 1.4826 * MAD of the fit residuals; a zero MAD flags
    nothing. Returned indices refer to the original point list.
    """
    res = fit.residuals()
    mad = float(np.median(np.abs(res - np.median(res))))
    if mad == 0.0:
        return frozenset()
    cut = k * 1.4826 * mad
    flagged = np.abs(res) > cut
    return frozenset(int(i) for i in fit.included_idx[flagged])
