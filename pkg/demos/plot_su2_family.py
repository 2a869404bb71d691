"""
The SU(2) family, end to end
============================

A left-invariant flag structure on SU(2) depends on a constant (x, y, z)
with x^2 + yz = -1.  We reduce it, read off the curvature and compute the
global integrand.  Everything below is exact.
"""

from flagcalc.catalog import full_report, su2_family

# the fully symbolic member; the relation x^2 + yz + 1 is imposed automatically
p = su2_family(x="x", y="y", z="z")
rep = full_report(p)

r = rep.reduction
print("theta11 =", r.theta11)
print("tau1    =", r.tau1)
print("tau2    =", r.tau2)

# %%
# Curvature coefficients.  Scalars are printed reduced modulo the relation,
# so yz stands in for -1 - x^2.
for k in ("R", "S11", "S12", "S21", "G", "Q1", "Q2", "U1", "U2"):
    print(f"{k:>4} = {getattr(rep, k)}")

# Q1 and Q2 were computed three ways and compared
print(sorted(rep.routes))
print("flat:", rep.flat)

# %%
# The integrand, before and after pulling back to a = const.
it = rep.integrand
print("full:   ", it.full_form)
print("section:", it.form, " times", it.transcendental_factor)

# %%
# Specializations.  x = 0 is flat; so is y = z = 0, which forces x = +-i.
for params in ({"x": 0, "y": 1, "z": -1}, {"x": "i", "y": 0, "z": 0},
               {"x": 1, "y": 1, "z": -2}):
    print(params, "flat =", full_report(su2_family(**params)).flat)

# the (r, s) parametrization lands on the same family
rs = su2_family(r1=2, r2="1/3", s1=-1)
print("x, y, z =", {k: str(v) for k, v in rs.params.items()})
