"""
Random structures in coordinates
================================

On R^3 with coordinates u, v, w take theta = dw - v du and
Z1 = (1 + fg) du + f dv, Z2 = g du + dv.  Any f, g work.  We draw a few at
random and run every identity check the pipeline knows about.
"""

import random

from flagcalc.catalog import coordinate_pseudo_flag, full_report

rng = random.Random(7)
monomials = ["u", "v", "w", "u*v", "v*w", "u^2", "1"]


def poly(n):
    return " + ".join(f"{rng.choice([-3, -2, -1, 1, 2, 3])}*{rng.choice(monomials)}" for _ in range(n))


for _ in range(5):
    f, g = poly(2), poly(1)
    rep = full_report(coordinate_pseudo_flag(f, g))
    print(f"f = {f:<18} g = {g:<8} checks failed: {rep.failed_checks()}  flat: {rep.flat}")

# %%
# The flat model itself: f = g = 0.
rep = full_report(coordinate_pseudo_flag(0, 0))
print("Q1, Q2, U1, U2 =", rep.Q1, rep.Q2, rep.U1, rep.U2)
