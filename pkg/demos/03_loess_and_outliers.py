"""
Local regression and robust outlier removal
===========================================

A handful of high-leverage units can flatten a local regression of
productivity on size and hide real increasing returns. This demo plants
three such outliers, shows the masked curve, removes them with the robust
residual rule, and shows the verdict flip. A PNG is written when
matplotlib is available.

Run with: python demos/03_loess_and_outliers.py
"""

import numpy as np

from prodsize import detect_outliers_residual, loess_fit
from prodsize.pipeline import loess_verdict

###############################################################################
# Size-productivity cloud with a gentle upward trend; three small units get
# implausibly high productivity (the classic small-noisy-unit artifact).

rng = np.random.default_rng(14)
n = 30
sizes = np.geomspace(2.0, 30.0, n)
productivity = 1.0 + 0.02 * sizes + rng.normal(0.0, 0.15, n)
for i in (2, 4, 6):
    productivity[i] += 2.0

points = list(zip(sizes, productivity))

###############################################################################
# Fit on everything: the inflated left end masks the trend.

fit_all = loess_fit(points, span=0.5, degree=1)
print("verdict with outliers in place:   ", loess_verdict(fit_all))

###############################################################################
# Flag points whose residual exceeds 3 robust standard deviations
# (1.4826 * MAD) and refit without them.

flagged = detect_outliers_residual(fit_all, k=3.0)
print("flagged points (by index):        ", sorted(flagged))

fit_clean = loess_fit(points, span=0.5, degree=1, exclude=flagged)
print("verdict after outlier removal:    ", loess_verdict(fit_clean))

q25, q75 = np.percentile(fit_clean.x[fit_clean.included_idx], [25, 75])
print(f"fitted productivity at size quartiles: {fit_clean.predict(q25):.3f} -> {fit_clean.predict(q75):.3f}")

###############################################################################
# Optional picture.

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping the plot")
else:
    grid = np.linspace(sizes.min(), sizes.max(), 200)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    keep = [i for i in range(n) if i not in flagged]
    ax.scatter(sizes[keep], productivity[keep], s=25, color="#4c72b0", label="units")
    ax.scatter(
        sizes[sorted(flagged)], productivity[sorted(flagged)],
        s=60, facecolors="none", edgecolors="#c44e52", linewidths=1.5, label="flagged outliers",
    )
    ax.plot(grid, [fit_all.predict(x) for x in grid], "--", color="#937860", label="fit with outliers")
    ax.plot(grid, [fit_clean.predict(x) for x in grid], color="#55a868", label="fit after removal")
    ax.set_xlabel("average research staff")
    ax.set_ylabel("productivity")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig("demos/loess_outliers.png", dpi=150)
    print("wrote demos/loess_outliers.png")
