"""
Dichotomized association tests
==============================

The returns-to-size analysis never regresses productivity on size
directly: it splits units into Small/Large and Low/High halves and tests
the resulting 2x2 table with a likelihood-ratio G-test plus Kendall's
tau-b for the direction. This demo reproduces three reference tables and
shows how the pieces respond.

Run with: python demos/02_association_tests.py
"""

from prodsize import ContingencyTable2x2, chi_square_sf, g_test, kendall_tau_b_2x2

###############################################################################
# Three reference tables: a near-independent 35-unit field, a 47-unit field
# with a weak positive pattern, and a 48-unit field with a clear
# small-low / large-high concentration.

tables = {
    "near-independent, 35 units": ContingencyTable2x2(11, 11, 6, 7),
    "weak concordance, 47 units": ContingencyTable2x2(14, 10, 10, 13),
    "clear concordance, 48 units": ContingencyTable2x2(15, 9, 9, 15),
}

for name, table in tables.items():
    g, p = g_test(table)
    tau = kendall_tau_b_2x2(table)
    cells = (table.a, table.b, table.c, table.d)
    expected = tuple(round(e, 2) for e in table.expected())
    verdict = "significant at 10%" if p < 0.10 else "not significant"
    print(f"{name}: cells={cells}")
    print(f"  expected under independence: {expected}")
    print(f"  G={g:.4f}  p={p:.4f}  tau_b={tau:+.4f}  -> {verdict}")

###############################################################################
# The G statistic is zero exactly when observed counts equal expectations,
# and a zero margin makes the test degenerate rather than misleading.

print("balanced table:", g_test(ContingencyTable2x2(10, 10, 10, 10)))
print("zero margin:   ", g_test(ContingencyTable2x2(20, 0, 0, 0)))

###############################################################################
# The p-value comes from the 1-df chi-square survival function; for 2x2
# tables that is erfc(sqrt(G/2)).

for x in (0.0484, 1.0409, 3.0321):
    print(f"sf({x}) = {chi_square_sf(x):.4f}")

###############################################################################
# tau_b is the direction: swapping the size columns flips its sign while
# the G-test (association strength) is unchanged.

t = ContingencyTable2x2(15, 9, 9, 15)
flipped = ContingencyTable2x2(9, 15, 15, 9)
print("tau original:", kendall_tau_b_2x2(t), " tau flipped:", kendall_tau_b_2x2(flipped))
print("G original:", round(g_test(t)[0], 4), " G flipped:", round(g_test(flipped)[0], 4))
