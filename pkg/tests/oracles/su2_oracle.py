"""Independent oracle for the SU(2) family values frozen into the tests.

Shares no code with flagcalc: a small exterior algebra over sympy, on the
coframe (t, t1, t2, l) = (theta, a Z1, Z2/a, da/a).  The differentials
below were expanded by hand from dtheta = Z1^Z2, dZ1 = theta^(x Z1 + y Z2),
dZ2 = theta^(z Z1 - x Z2), da = a l.  The relation x^2 + y z = -1 is
imposed by eliminating y = -(1 + x^2)/z.

Run:  python3 tests/oracles/su2_oracle.py
"""

import itertools

import sympy as sp

x, y, z, a = sp.symbols("x y z a")
NAMES = ("t", "t1", "t2", "l")
REL = {y: -(1 + x**2) / z}


def canon(e):
    return sp.factor(sp.simplify(sp.sympify(e).subs(REL)))


def form(d):
    return {k: v for k, v in d.items() if canon(v) != 0}


def basis(n):
    return {(NAMES.index(n),): sp.Integer(1)}


def add(*fs):
    out = {}
    for f in fs:
        for k, v in f.items():
            out[k] = out.get(k, 0) + v
    return form(out)


def scale(f, c):
    return form({k: v * c for k, v in f.items()})


def wedge(f, g):
    out = {}
    for (i, u), (j, v) in itertools.product(f.items(), g.items()):
        idx = i + j
        if len(set(idx)) < len(idx):
            continue
        # sign of the sorting permutation
        perm = sorted(range(len(idx)), key=lambda p: idx[p])
        sign = 1
        seen = [False] * len(perm)
        for s in range(len(perm)):
            if seen[s]:
                continue
            c, L = s, 0
            while not seen[c]:
                seen[c] = True
                c = perm[c]
                L += 1
            if L % 2 == 0:
                sign = -sign
        key = tuple(sorted(idx))
        out[key] = out.get(key, 0) + sign * u * v
    return form(out)


T, T1, T2, L = (basis(n) for n in NAMES)
DRULE = {
    0: wedge(T1, T2),
    1: add(wedge(L, T1), wedge(T, add(scale(T1, x), scale(T2, y * a**2)))),
    2: add(scale(wedge(L, T2), -1), wedge(T, add(scale(T1, z / a**2), scale(T2, -x)))),
    3: {},
}


def d0(f):
    return scale(L, a * sp.diff(f, a))


def d(f):
    out = {}
    for idx, c in f.items():
        term = wedge(d0(c), {idx: 1})
        for p, i in enumerate(idx):
            rest_l = {idx[:p]: 1} if p else {(): 1}
            rest_r = {idx[p + 1:]: 1} if p + 1 < len(idx) else {(): 1}
            piece = wedge(wedge(rest_l, DRULE[i]), rest_r)
            term = add(term, scale(piece, c * (-1) ** p))
        out = add(out, term)
    return out


def coeff(f, *names):
    key = tuple(NAMES.index(n) for n in names)
    srt = tuple(sorted(key))
    sign = -1 if len(key) == 2 and key[0] > key[1] else 1
    return canon(sign * f.get(srt, 0))


def main():
    th11 = add(scale(L, -1), scale(T, -x))
    tau1 = scale(T2, y * a**2)
    tau2 = scale(T1, z / a**2)
    # normalized structure equations
    dth1 = add(d(T1), scale(wedge(T1, th11), -1), scale(wedge(T, tau1), -1))
    dth2 = add(d(T2), wedge(T2, th11), scale(wedge(T, tau2), -1))
    print("normalized equations hold:", not dth1, not dth2)
    print("d(y a^2 theta2) =", {k: canon(v) for k, v in d(scale(T2, y * a**2)).items()})
    d11 = d(th11)
    R = coeff(d11, "t1", "t2")
    W1, W2 = coeff(d11, "t1", "t"), coeff(d11, "t2", "t")
    dtau1 = add(d(tau1), scale(wedge(tau1, th11), -1))
    dtau2 = add(d(tau2), wedge(tau2, th11))
    S11, S12 = coeff(dtau1, "t", "t1"), coeff(dtau1, "t", "t2")
    S21, S22 = coeff(dtau2, "t", "t1"), coeff(dtau2, "t", "t2")
    print("R W1 W2 =", R, W1, W2)
    print("S11 S12 S21 S22 =", S11, S12, S21, S22)
    # the R and W derivatives vanish (constant R, zero W): c, E, G directly
    c = -R / 4
    G = canon(-2 * (S11 + R**2 / 16))
    print("c G =", c, G)
    w, w1, w2 = T, T1, T2
    w11 = add(th11, scale(T, c))
    p1 = add(scale(T1, c), tau1)
    p2 = add(scale(T2, -c), tau2)
    psi = scale(T, G)
    print("omega11 =", {k: canon(v) for k, v in w11.items()})
    h = sp.Rational(1, 2)
    eqs = {
        "d omega": add(d(w), scale(wedge(w1, w2), -1)),
        "d omega1": add(d(w1), scale(wedge(w1, w11), -1), scale(wedge(w, p1), -1)),
        "d omega2": add(d(w2), wedge(w2, w11), scale(wedge(w, p2), -1)),
        "quadratic": add(scale(wedge(w1, p2), -1), wedge(w2, p1), scale(wedge(w, psi), -1)),
        "d omega11": add(d(w11), scale(wedge(w2, p1), -3 * h), scale(wedge(w1, p2), -3 * h)),
        "d phi1": add(d(p1), scale(wedge(p1, w11), -1), scale(wedge(w1, psi), -h)),
        "d phi2": add(d(p2), wedge(p2, w11), scale(wedge(w2, psi), -h)),
        "d psi": add(d(psi), scale(wedge(p1, p2), -2)),
    }
    for k in ("d omega", "d omega1", "d omega2", "quadratic", "d omega11"):
        print(f"{k} residual:", {kk: canon(v) for kk, v in eqs[k].items()})
    Q1 = coeff(eqs["d phi1"], "t", "t2")
    Q2 = coeff(eqs["d phi2"], "t", "t1")
    print("d phi1 other terms:", {k: canon(v) for k, v in add(eqs["d phi1"], scale(wedge(T, T2), -Q1)).items()})
    print("d phi2 other terms:", {k: canon(v) for k, v in add(eqs["d phi2"], scale(wedge(T, T1), -Q2)).items()})
    print("Q1 Q2 =", Q1, Q2)
    print("d psi lhs:", {k: canon(v) for k, v in eqs["d psi"].items()})
    # Bianchi: dQ1 + 2 Q1 omega11 and dQ2 - 2 Q2 omega11, plus U identities with U = 0
    b1 = add(d0(Q1), scale(w11, 2 * Q1))
    b2 = add(d0(Q2), scale(w11, -2 * Q2))
    bu1 = scale(p1, 2 * Q2)
    bu2 = scale(p2, -2 * Q1)
    show = lambda f: {NAMES[k[0]]: canon(v) for k, v in f.items()}
    print("dQ1 identity:", show(b1))
    print("dQ2 identity:", show(b2))
    print("dU1 identity:", show(bu1))
    print("dU2 identity:", show(bu2))
    inner = add(scale(wedge(T1, T2), -R / 2))
    integ = add(scale(wedge(wedge(T, T1), T2), G / 2 + R**2 / 16 - (y * a**2) * (z / a**2)),
                wedge(th11, inner))
    print("integrand:", {tuple(NAMES[i] for i in k): canon(v) for k, v in integ.items()})
    # matrix route: pi as assembled from the slots (phi = 0), tr(pi^3)/3
    pi = [[scale(w11, sp.Rational(-1, 3)), scale(p2, -1), scale(psi, sp.Rational(-1, 4))],
          [w1, scale(w11, sp.Rational(2, 3)), scale(p1, h)],
          [scale(w, 2), scale(w2, 2), scale(w11, sp.Rational(-1, 3))]]
    print("pi[1][1] =", show(pi[0][0]))
    tr = {}
    for i, j, k in itertools.product(range(3), repeat=3):
        tr = add(tr, wedge(wedge(pi[i][j], pi[j][k]), pi[k][i]))
    print("tr(pi^3)/3:", {tuple(NAMES[i] for i in k): canon(v / 3) for k, v in tr.items()})


if __name__ == "__main__":
    main()
