"""Pseudo-flag normalization, curvature coefficients and the embedding of
the pseudo-flag coframe into the flag connection."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from .errors import (CrossCheckMismatch, DegenerateContact, IllFormedInvolution,
                     InputError, NotAPseudoFlag, ShapeViolation)
from .exterior import (Form, FrameSpace, Rebase, coefficient, decompose,
                       exterior_derivative, pullback_section, rebase, wedge)
from .matrix import (ConnectionForms, assemble_pi, curvature, extract_components,
                     tc2)
from .scalar import (I, RelationSet, Scalar, as_scalar, substitute,
                     symbol, symbol_id, symbol_name)

__all__ = [
    "PseudoFlagStructure", "ReductionOutput", "CurvatureReport", "StructureReport",
    "Integrand", "BianchiReport", "ConjugationSpec", "RealityReport",
    "reduce_pseudo_flag", "normalize", "perturb", "curvature_coefficients",
    "embed_to_connection", "verify_structure_equations", "curvature_invariants",
    "bianchi_checks", "invariant_integrand", "check_cr_reality",
]


def _q(n, d=1) -> Scalar:
    return as_scalar(Fraction(n, d))


def _zero(s: Scalar, rel: RelationSet) -> bool:
    return rel.is_zero(s) if rel.rules else not s


# ---------------------------------------------------------------------------
# Input structure
# ---------------------------------------------------------------------------

class PseudoFlagStructure:
    """A contact form theta with dtheta = Z1 ^ Z2 on a frame that also
    carries the fiber scale ``a`` (da = a * lam, lam a basis form).

    The forms of the reduction live on the rebased coframe
    (theta, theta1 = a Z1, theta2 = Z2 / a, lam).
    """

    def __init__(self, frame: FrameSpace, theta: Form, Z1: Form, Z2: Form,
                 scale: str = "a", fiber: str = "lam",
                 names: Tuple[str, str, str] = ("theta", "theta1", "theta2")):
        if not frame.usable:
            raise NotAPseudoFlag("the frame has not passed the d^2 = 0 check")
        if frame.dim != 4:
            raise NotAPseudoFlag("a pseudo-flag frame has exactly four basis forms "
                                 "(theta, Z1, Z2 directions and the fiber form)")
        for f in (theta, Z1, Z2):
            if f.frame is not frame or f.degree != 1:
                raise NotAPseudoFlag("theta, Z1, Z2 must be 1-forms on the frame")
        if fiber not in frame.index:
            raise NotAPseudoFlag(f"fiber form {fiber!r} is not a basis form")
        sid = symbol_id(scale, create=False)
        if sid not in frame.fiber_ids:
            raise NotAPseudoFlag(f"scale {scale!r} is not a fiber coordinate")
        self.frame = frame
        self.theta, self.Z1, self.Z2 = theta, Z1, Z2
        self.scale = scale
        self.fiber = fiber
        self.a = symbol(scale)
        self.lam = frame.basis_form(fiber)
        if len(set(names) | {fiber}) != 4:
            raise InputError("coframe names must be distinct")
        self.names = tuple(names)
        rel = frame.relations
        if not (frame.fiber_d[sid] - self.lam * self.a).is_zero():
            raise NotAPseudoFlag(f"d {scale} must equal {scale}*{fiber}")
        dtheta = exterior_derivative(theta)
        if not (dtheta - wedge(Z1, Z2)).is_zero():
            raise NotAPseudoFlag(f"d theta - Z1^Z2 = {(dtheta - wedge(Z1, Z2)).reduced()}, "
                                 "expected 0")
        if wedge(theta, dtheta).is_zero():
            raise DegenerateContact("theta ^ d theta vanishes: the contact form is degenerate")
        for f in (theta, Z1, Z2):
            if any(sid in v.symbols() for v in f.terms.values()) or \
                    not _zero(coefficient(f, [fiber]), rel):
                raise NotAPseudoFlag("theta, Z1, Z2 must not involve the fiber scale or form")

    @property
    def relations(self) -> RelationSet:
        return self.frame.relations

    def __repr__(self):
        return f"PseudoFlagStructure(theta={self.theta}, Z1={self.Z1}, Z2={self.Z2})"


@dataclass
class ReductionOutput:
    """theta11, tau1, tau2 on the rebased coframe, plus the z coefficients."""

    structure: PseudoFlagStructure
    xframe: FrameSpace
    transport: Rebase
    theta: Form
    theta1: Form
    theta2: Form
    lam: Form
    theta11: Form
    tau1: Form
    tau2: Form
    z: Dict[str, Scalar]

    @property
    def relations(self) -> RelationSet:
        return self.xframe.relations

    def _c(self, f: Form, which: Form) -> Scalar:
        name = self.xframe.basis[next(iter(which.terms)).bit_length() - 1]
        return self.relations.reduce_scalar(coefficient(f, [name]))

    @property
    def tau11(self) -> Scalar:
        return self._c(self.tau1, self.theta1)

    @property
    def tau12(self) -> Scalar:
        """tau^1_2: coefficient of theta2 in tau1."""
        return self._c(self.tau1, self.theta2)

    @property
    def tau21(self) -> Scalar:
        """tau^2_1: coefficient of theta1 in tau2."""
        return self._c(self.tau2, self.theta1)

    @property
    def tau22(self) -> Scalar:
        return self._c(self.tau2, self.theta2)

    def residuals(self) -> Dict[str, Form]:
        """Left minus right sides of the two normalized structure equations."""
        d1 = exterior_derivative(self.theta1)
        d2 = exterior_derivative(self.theta2)
        return {
            "dtheta1": (d1 - wedge(self.theta1, self.theta11) - wedge(self.theta, self.tau1)).reduced(),
            "dtheta2": (d2 + wedge(self.theta2, self.theta11) - wedge(self.theta, self.tau2)).reduced(),
        }

    def with_forms(self, theta11: Form, tau1: Form, tau2: Form) -> "ReductionOutput":
        return ReductionOutput(self.structure, self.xframe, self.transport, self.theta,
                               self.theta1, self.theta2, self.lam, theta11, tau1, tau2, self.z)


def _xframe(p: PseudoFlagStructure) -> Rebase:
    n0, n1, n2 = p.names
    return rebase(p.frame, [(n0, p.theta), (n1, p.Z1 * p.a), (n2, p.Z2 / p.a),
                            (p.fiber, p.lam)])


def reduce_pseudo_flag(p: PseudoFlagStructure) -> ReductionOutput:
    """Normalized theta11, tau1, tau2 with tau^1_1 = tau^2_2 = 0."""
    rel = p.relations
    gens = [wedge(p.Z1, p.Z2), wedge(p.Z1, p.theta), wedge(p.Z2, p.theta)]
    z = {}
    for i, Z in ((1, p.Z1), (2, p.Z2)):
        (c12, c10, c20), residual = decompose(exterior_derivative(Z), gens)
        if not residual.is_zero():
            raise NotAPseudoFlag(f"dZ{i} has terms outside Z1^Z2, Z1^theta, Z2^theta: {residual}")
        z[f"z{i}_12"], z[f"z{i}_10"], z[f"z{i}_20"] = c12, c10, c20
    rb = _xframe(p)
    X = rb.new
    th, th1, th2, lam = X.basis_forms()
    a = p.a
    Z1x, Z2x = th1 / a, th2 * a
    theta11 = -lam + Z2x * z["z1_12"] + Z1x * z["z2_12"]
    tau1 = -th1 * z["z1_10"] - th2 * (z["z1_20"] * a * a)
    tau2 = -th1 * (z["z2_10"] / (a * a)) - th2 * z["z2_20"]
    out = ReductionOutput(p, X, rb, th, th1, th2, lam, theta11.reduced(), tau1.reduced(),
                          tau2.reduced(), z)
    bad = {k: r for k, r in out.residuals().items() if not r.is_zero()}
    if bad:
        raise NotAPseudoFlag("candidate forms fail the structure equations: "
                             + "; ".join(f"{k}: {v}" for k, v in bad.items()))
    out = normalize(out)
    if not _zero(out.tau22, rel):
        raise ShapeViolation(f"tau^2_2 = {out.tau22} after normalization, expected 0")
    return out


def perturb(r: ReductionOutput, A) -> ReductionOutput:
    """Shift theta11 by A theta, keeping both structure equations exact."""
    A = as_scalar(A)
    return r.with_forms((r.theta11 + r.theta * A).reduced(),
                        (r.tau1 + r.theta1 * A).reduced(),
                        (r.tau2 - r.theta2 * A).reduced())


def normalize(r: ReductionOutput) -> ReductionOutput:
    """The unique shift making tau^1_1 vanish."""
    t11 = r.tau11
    if _zero(t11, r.relations):
        return r
    return perturb(r, -t11)


# ---------------------------------------------------------------------------
# Curvature coefficients
# ---------------------------------------------------------------------------

_SCALAR_FIELDS = (
    "R", "W1", "W2", "S11", "S12", "S21", "S22", "tau12", "tau21",
    "R0", "R1", "R2", "W10", "W11", "W12", "W20", "W21", "W22",
    "R01", "R11", "R12", "R02", "R21", "R22",
    "c", "E1", "E2", "G", "Q1", "Q2", "U1", "U2",
)


@dataclass
class CurvatureReport:
    """Every derived coefficient.  Names put the upper index first, so S12 is
    S^1_2 and tau21 is tau^2_1; W1, W2 are W^1, W^2 and W12 is W^1_2."""

    R: Optional[Scalar] = None
    W1: Optional[Scalar] = None
    W2: Optional[Scalar] = None
    S11: Optional[Scalar] = None
    S12: Optional[Scalar] = None
    S21: Optional[Scalar] = None
    S22: Optional[Scalar] = None
    tau12: Optional[Scalar] = None
    tau21: Optional[Scalar] = None
    R0: Optional[Scalar] = None
    R1: Optional[Scalar] = None
    R2: Optional[Scalar] = None
    W10: Optional[Scalar] = None
    W11: Optional[Scalar] = None
    W12: Optional[Scalar] = None
    W20: Optional[Scalar] = None
    W21: Optional[Scalar] = None
    W22: Optional[Scalar] = None
    R01: Optional[Scalar] = None
    R11: Optional[Scalar] = None
    R12: Optional[Scalar] = None
    R02: Optional[Scalar] = None
    R21: Optional[Scalar] = None
    R22: Optional[Scalar] = None
    c: Optional[Scalar] = None
    E1: Optional[Scalar] = None
    E2: Optional[Scalar] = None
    G: Optional[Scalar] = None
    Q1: Optional[Scalar] = None
    Q2: Optional[Scalar] = None
    U1: Optional[Scalar] = None
    U2: Optional[Scalar] = None
    relations: RelationSet = field(default_factory=RelationSet, repr=False)
    checks: Dict[str, Scalar] = field(default_factory=dict, repr=False)
    routes: Dict[str, Dict[str, Scalar]] = field(default_factory=dict, repr=False)
    integrand: Optional["Integrand"] = field(default=None, repr=False)
    bianchi: Optional["BianchiReport"] = field(default=None, repr=False)
    reduction: Optional[ReductionOutput] = field(default=None, repr=False)
    connection: Optional[ConnectionForms] = field(default=None, repr=False)
    structure: Optional["StructureReport"] = field(default=None, repr=False)
    stages: Dict[str, str] = field(default_factory=dict, repr=False)

    def scalars(self) -> Dict[str, Scalar]:
        return {k: getattr(self, k) for k in _SCALAR_FIELDS if getattr(self, k) is not None}

    def failed_checks(self) -> List[str]:
        return [k for k, v in self.checks.items() if not _zero(v, self.relations)]

    @property
    def flat(self) -> Optional[bool]:
        vals = (self.Q1, self.Q2, self.U1, self.U2)
        if any(v is None for v in vals):
            return None
        return all(_zero(v, self.relations) for v in vals)


def _one_form_coeffs(f: Form, r: ReductionOutput, label: str) -> Tuple[Scalar, Scalar, Scalar]:
    """(theta, theta1, theta2) coefficients; a lam component is a shape error."""
    X = r.xframe
    rel = r.relations
    n0, n1, n2, nl = X.basis
    lam_c = rel.reduce_scalar(coefficient(f, [nl]))
    if lam_c:
        raise ShapeViolation(f"{label} has a residual {nl} component {lam_c}")
    return tuple(rel.reduce_scalar(coefficient(f, [n])) for n in (n0, n1, n2))


def curvature_coefficients(r: ReductionOutput) -> CurvatureReport:
    """R, W, S from the differentials of theta11, tau1, tau2 and the first
    and second derivative coefficients of R and W."""
    rel = r.relations
    red = rel.reduce_scalar
    th, th1, th2, lam = r.theta, r.theta1, r.theta2, r.lam
    t11 = r.theta11
    rep = CurvatureReport(relations=rel)

    def split2(form: Form, gens, label):
        coeffs, residual = decompose(form, gens)
        if not residual.is_zero():
            raise ShapeViolation(f"{label} has residual terms {residual}")
        return [red(c) for c in coeffs]

    d11 = exterior_derivative(t11)
    rep.R, rep.W1, rep.W2 = split2(d11, [wedge(th1, th2), wedge(th1, th), wedge(th2, th)],
                                   "d theta11")
    e19 = exterior_derivative(r.tau1) - wedge(r.tau1, t11)
    e20 = exterior_derivative(r.tau2) + wedge(r.tau2, t11)
    m19, rep.S11, rep.S12 = split2(e19, [wedge(th1, th2), wedge(th, th1), wedge(th, th2)],
                                   "d tau1 - tau1^theta11")
    m20, rep.S21, rep.S22 = split2(e20, [wedge(th1, th2), wedge(th, th1), wedge(th, th2)],
                                   "d tau2 + tau2^theta11")
    rep.checks["theta1^theta2 part of d tau1 - tau1^theta11 = -W2"] = m19 + rep.W2
    rep.checks["theta1^theta2 part of d tau2 + tau2^theta11 = -W1"] = m20 + rep.W1
    rep.tau12, rep.tau21 = r.tau12, r.tau21
    tt = rep.tau12 * rep.tau21
    rep.checks["S11 = tau12*tau21"] = red(rep.S11 - tt)
    rep.checks["S22 = tau12*tau21"] = red(rep.S22 - tt)

    X = r.xframe

    def d0(s: Scalar) -> Form:
        return exterior_derivative(X.scalar_form(s))

    rep.R0, rep.R1, rep.R2 = _one_form_coeffs(d0(rep.R), r, "dR")
    rep.W10, rep.W11, rep.W12 = _one_form_coeffs(d0(rep.W1) - t11 * rep.W1, r,
                                                 "dW1 - W1 theta11")
    rep.W20, rep.W21, rep.W22 = _one_form_coeffs(d0(rep.W2) + t11 * rep.W2, r,
                                                 "dW2 + W2 theta11")
    rep.checks["R0 = W12 - W21"] = red(rep.R0 - (rep.W12 - rep.W21))
    half = _q(1, 2)
    e1 = d0(rep.R1) - t11 * rep.R1 + th * (rep.R2 * rep.tau21) - th2 * (half * rep.R0)
    e2 = d0(rep.R2) + t11 * rep.R2 + th * (rep.R1 * rep.tau12) + th1 * (half * rep.R0)
    rep.R01, rep.R11, rep.R12 = _one_form_coeffs(e1, r, "dR1 expansion")
    rep.R02, rep.R21, rep.R22 = _one_form_coeffs(e2, r, "dR2 expansion")
    rep.checks["R12 = R21"] = red(rep.R12 - rep.R21)
    R00, R01b, R02b = _one_form_coeffs(d0(rep.R0), r, "dR0")
    rep.checks["R01 matches dR0"] = red(rep.R01 - R01b)
    rep.checks["R02 matches dR0"] = red(rep.R02 - R02b)
    return rep


def embed_to_connection(r: ReductionOutput, rep: CurvatureReport) -> ConnectionForms:
    """The flag connection on the section with phi = 0.  Fills c, E1, E2, G."""
    red = r.relations.reduce_scalar
    R = rep.R
    rep.c = red(-R / 4)
    rep.E2 = red(_q(2, 3) * (rep.W1 - rep.R1 / 4))
    rep.E1 = red(_q(2, 3) * (rep.W2 - rep.R2 / 4))
    # G from the theta^theta1 identity; the theta^theta2 analogue is a check
    rep.G = red(-2 * (rep.S11 - rep.R0 / 3 + R * R / 16 - _q(2, 3) * rep.W21 + rep.R21 / 6))
    G_alt = -2 * (rep.S22 + rep.R0 / 3 + R * R / 16 - _q(2, 3) * rep.W12 + rep.R12 / 6)
    rep.checks["G from S11 identity = G from S22 identity"] = red(rep.G - G_alt)
    th, th1, th2 = r.theta, r.theta1, r.theta2
    c = rep.c
    return ConnectionForms(
        omega=th,
        omega1=th1,
        omega2=th2,
        phi=r.xframe.zero(1),
        omega11=(r.theta11 + th * c).reduced(),
        phi1=(th1 * c + th * rep.E1 + r.tau1).reduced(),
        phi2=(-th2 * c + th * rep.E2 + r.tau2).reduced(),
        psi=(th1 * rep.E2 - th2 * rep.E1 + th * rep.G).reduced(),
    )


# ---------------------------------------------------------------------------
# Structure equations and invariants
# ---------------------------------------------------------------------------

EQUATIONS = ("Eq. 22", "Eq. 23", "Eq. 24", "Eq. 25", "Eq. 26", "Eq. 27", "Eq. 28", "Eq. 29")


@dataclass
class StructureReport:
    """Left-hand sides of the structure equations, and what remains after the
    allowed curvature terms are removed."""

    lhs: Dict[str, Form]
    residuals: Dict[str, Form]
    Q1: Scalar
    Q2: Scalar
    U1: Scalar
    U2: Scalar

    @property
    def ok(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    def failures(self) -> Dict[str, Form]:
        return {k: r for k, r in self.residuals.items() if not r.is_zero()}

    def describe_failures(self) -> List[str]:
        return [f"{k}: residual {v}" for k, v in self.failures().items()]


def verify_structure_equations(c: ConnectionForms) -> StructureReport:
    """Residuals of the eight structure equations of the flag connection."""
    d = exterior_derivative
    w, w1, w2, p = c.omega, c.omega1, c.omega2, c.phi
    w11, p1, p2, s = c.omega11, c.phi1, c.phi2, c.psi
    h, t = _q(1, 2), _q(3, 2)
    lhs = {
        "Eq. 22": d(w) - wedge(w, p) - wedge(w1, w2),
        "Eq. 23": d(w1) - wedge(w1, p) * h - wedge(w1, w11) - wedge(w, p1),
        "Eq. 24": d(w2) - wedge(w2, p) * h + wedge(w2, w11) - wedge(w, p2),
        "Eq. 25": d(p) - wedge(w1, p2) + wedge(w2, p1) - wedge(w, s),
        "Eq. 26": d(w11) - wedge(w2, p1) * t - wedge(w1, p2) * t,
        "Eq. 27": d(p1) - wedge(p1, w11) - wedge(w1, s) * h - wedge(p, p1) * h,
        "Eq. 28": d(p2) + wedge(p2, w11) - wedge(w2, s) * h - wedge(p, p2) * h,
        "Eq. 29": d(s) - wedge(p1, p2) * 2 - wedge(p, s),
    }
    lhs = {k: v.reduced() for k, v in lhs.items()}
    residuals = {k: lhs[k] for k in EQUATIONS[:5]}
    (q1,), residuals["Eq. 27"] = decompose(lhs["Eq. 27"], [wedge(w, w2)])
    (q2,), residuals["Eq. 28"] = decompose(lhs["Eq. 28"], [wedge(w, w1)])
    (u1, u2), residuals["Eq. 29"] = decompose(lhs["Eq. 29"], [wedge(w1, w), wedge(w2, w)])
    red = c.frame.relations.reduce_scalar
    return StructureReport(lhs, residuals, red(q1), red(q2), red(u1), red(u2))


def curvature_invariants(c: ConnectionForms, rep: Optional[CurvatureReport] = None,
                         structure: Optional[StructureReport] = None) -> CurvatureReport:
    """Q1, Q2, U1, U2 by the structure equations and by the matrix curvature,
    and Q1, Q2 also by the closed-form identities when ``rep`` carries the
    curvature coefficients.  Any disagreement raises CrossCheckMismatch."""
    rel = c.frame.relations
    rep = rep if rep is not None else CurvatureReport(relations=rel)
    st = structure if structure is not None else verify_structure_equations(c)
    if not st.ok:
        raise ShapeViolation("structure equations fail: " + "; ".join(st.describe_failures()))
    pi = assemble_pi(c)
    comp = extract_components(curvature(pi), pi)
    routes = {
        "structure equations": {"Q1": st.Q1, "Q2": st.Q2, "U1": st.U1, "U2": st.U2},
        "matrix curvature": {"Q1": comp.Q1, "Q2": comp.Q2, "U1": comp.U1, "U2": comp.U2},
    }
    if rep.S12 is not None:
        h = _q(1, 2)
        q1 = rep.S12 - h * rep.R * rep.tau12 - _q(2, 3) * rep.W22 + rep.R22 / 6
        q2 = rep.S21 + h * rep.R * rep.tau21 - _q(2, 3) * rep.W11 + rep.R11 / 6
        routes["closed forms"] = {"Q1": rel.reduce_scalar(q1), "Q2": rel.reduce_scalar(q2)}
    base = routes["structure equations"]
    for name, vals in routes.items():
        for k, v in vals.items():
            if not _zero(v - base[k], rel):
                raise CrossCheckMismatch(
                    f"{k} disagrees: structure equations give {base[k]}, {name} gives {v}")
    rep.Q1, rep.Q2, rep.U1, rep.U2 = base["Q1"], base["Q2"], base["U1"], base["U2"]
    rep.routes = routes
    return rep


@dataclass
class BianchiReport:
    coefficients: Dict[str, Scalar]
    residuals: Dict[str, Form]
    checks: Dict[str, Scalar]
    relations: RelationSet = field(default_factory=RelationSet, repr=False)

    @property
    def ok(self) -> bool:
        return (all(r.is_zero() for r in self.residuals.values())
                and all(_zero(v, self.relations) for v in self.checks.values()))


def bianchi_checks(c: ConnectionForms, rep: CurvatureReport) -> BianchiReport:
    """Expand the differential identities satisfied by Q1, Q2, U1, U2."""
    rel = c.frame.relations
    red = rel.reduce_scalar
    X = c.frame
    w, w1, w2 = c.omega, c.omega1, c.omega2

    def d0(s):
        return exterior_derivative(X.scalar_form(s))

    Q1, Q2, U1, U2 = rep.Q1, rep.Q2, rep.U1, rep.U2
    h = _q(1, 2)
    f = _q(5, 2)
    exprs = {
        "dQ1": d0(Q1) + c.omega11 * (2 * Q1) - c.phi * (2 * Q1),
        "dQ2": d0(Q2) - c.omega11 * (2 * Q2) - c.phi * (2 * Q2),
        "dU1": d0(U1) - c.phi * (f * U1) - c.omega11 * U1 + c.phi1 * (2 * Q2),
        "dU2": d0(U2) - c.phi * (f * U2) + c.omega11 * U2 - c.phi2 * (2 * Q1),
    }
    coeffs: Dict[str, Scalar] = {}
    residuals: Dict[str, Form] = {}
    split = {}
    for k, e in exprs.items():
        cs, res = decompose(e.reduced(), [w, w1, w2])
        split[k] = [red(v) for v in cs]
        residuals[k] = res
    coeffs["S1"], u2_slot, coeffs["T1"] = split["dQ1"]
    coeffs["S2"], coeffs["T2"], u1_slot = split["dQ2"]
    coeffs["A"], coeffs["B"], coeffs["C"] = split["dU1"]
    coeffs["D"], C2, coeffs["E"] = split["dU2"]
    checks = {
        "omega1 part of dQ1 identity = -U2/2": red(u2_slot + h * U2),
        "omega2 part of dQ2 identity = -U1/2": red(u1_slot + h * U1),
        "C agrees between the U1 and U2 identities": red(coeffs["C"] - C2),
    }
    out = BianchiReport(coeffs, residuals, checks, rel)
    rep.bianchi = out
    return out


@dataclass
class Integrand:
    """The invariant 3-form, carrying its factor 1/(8 pi^2) as text."""

    form: Form
    tc2_route: Form
    killed: Tuple[str, ...]
    full_form: Form
    full_tc2_route: Form
    transcendental_factor: str = "1/(8*pi^2)"

    @property
    def agrees(self) -> bool:
        return (self.form - self.tc2_route).is_zero()


def invariant_integrand(c: ConnectionForms, rep: CurvatureReport, r: ReductionOutput,
                        kill_fiber: bool = True) -> Integrand:
    """The closed-form integrand, checked against tr(pi^pi^pi)/3 (both
    relative to the factor 1/(8 pi^2))."""
    th, th1, th2 = r.theta, r.theta1, r.theta2
    R = rep.R
    vol = wedge(wedge(th, th1), th2)
    inner = (wedge(th, th1) * rep.E2 + wedge(th, th2) * rep.E1
             - wedge(th1, th2) * (R / 2))
    form = (vol * (rep.G / 2 + R * R / 16 - rep.tau12 * rep.tau21)
            + wedge(r.theta11, inner)).reduced()
    t = tc2(assemble_pi(c))
    if not t.ok:
        raise CrossCheckMismatch("the transgression form fails tr(Pi^pi) = 0 or closedness")
    via_tc2 = (t.form * 8).reduced()
    killed = (r.xframe.basis[3],) if kill_fiber else ()
    a = pullback_section(form, killed)
    b = pullback_section(via_tc2, killed)
    if not (a - b).is_zero():
        raise CrossCheckMismatch(f"integrand disagrees with tr(pi^3)/3: difference {(a - b).reduced()}")
    out = Integrand(a, b, killed, form, via_tc2)
    rep.integrand = out
    return out


# ---------------------------------------------------------------------------
# Reality conditions
# ---------------------------------------------------------------------------

@dataclass
class ConjugationSpec:
    """Complex conjugation: i -> -i on coefficients, ``symbols`` gives the
    conjugate of each symbol and ``forms`` the conjugate of each basis form."""

    symbols: Dict[str, Scalar]
    forms: Dict[str, Form]

    @classmethod
    def parse(cls, frame: FrameSpace, entries: Mapping[str, str]) -> "ConjugationSpec":
        from .dsl import parse_expression
        syms, forms = {}, {}
        for k, text in entries.items():
            if k in frame.index:
                forms[k] = parse_expression(text, frame=frame, as_form=True)
            else:
                syms[k] = parse_expression(text, frame=frame)
                if not isinstance(syms[k], Scalar):
                    raise IllFormedInvolution(f"conjugate of symbol {k} must be a scalar")
        return cls(syms, forms)

    def scalar(self, s: Scalar, rel: RelationSet) -> Scalar:
        s = s.conjugate_coefficients()
        if not self.symbols:
            return s
        return rel.reduce_scalar(substitute(s, self.symbols, rel))

    def form(self, f: Form) -> Form:
        frame = f.frame
        out = frame.zero(f.degree)
        rel = frame.relations
        for names, cf in f.items():
            term = frame.scalar_form(self.scalar(cf, rel))
            for n in names:
                term = wedge(term, self.forms[n])
            out = out + term
        return out.reduced()

    def validate(self, frame: FrameSpace) -> None:
        """Raise IllFormedInvolution unless conj is an involution commuting with d."""
        rel = frame.relations
        missing = [n for n in frame.basis if n not in self.forms]
        if missing:
            raise IllFormedInvolution("no conjugate declared for basis forms: " + ", ".join(missing))
        declared = {symbol_name(s) for s in frame.declared_symbols}
        for k in self.symbols:
            if k not in declared:
                raise IllFormedInvolution(f"{k!r} is not a symbol of the frame")
        for k, f in self.forms.items():
            if f.frame is not frame or f.degree != 1:
                raise IllFormedInvolution(f"conjugate of {k} must be a 1-form on the frame")
        for k, v in self.symbols.items():
            back = self.scalar(v, rel)
            if not _zero(back - symbol(k), rel):
                raise IllFormedInvolution(f"conj(conj({k})) = {back}, not {k}")
        for n in frame.basis:
            back = self.form(self.forms[n])
            if not (back - frame.basis_form(n)).is_zero():
                raise IllFormedInvolution(f"conj(conj({n})) = {back}, not {n}")
        for n in frame.basis:
            lhs = self.form(exterior_derivative(frame.basis_form(n)))
            rhs = exterior_derivative(self.forms[n])
            if not (lhs - rhs).is_zero():
                raise IllFormedInvolution(f"conjugation does not commute with d on {n}")
        for sid in frame.fiber_ids:
            k = symbol_name(sid)
            lhs = self.form(exterior_derivative(frame.scalar_form(symbol(k))))
            rhs = exterior_derivative(frame.scalar_form(self.scalar(symbol(k), rel)))
            if not (lhs - rhs).is_zero():
                raise IllFormedInvolution(f"conjugation does not commute with d on {k}")


@dataclass
class RealityReport:
    premise: Form
    premise_holds: bool
    residuals: Dict[str, object]
    scalar_residuals: Dict[str, Scalar] = field(default_factory=dict)

    def passed(self) -> Dict[str, bool]:
        out = {}
        for k, v in self.residuals.items():
            out[k] = v.is_zero() if isinstance(v, Form) else v
        return out

    @property
    def ok(self) -> bool:
        return self.premise_holds and all(self.passed().values())


def check_cr_reality(c: ConnectionForms, conj: ConjugationSpec,
                     rep: Optional[CurvatureReport] = None) -> RealityReport:
    """Reality conditions implied by omega2 = i conj(omega1)."""
    frame = c.frame
    rel = frame.relations
    conj.validate(frame)
    premise = (c.omega2 - conj.form(c.omega1) * I).reduced()
    if not premise.is_zero():
        return RealityReport(premise, False, {})
    if rep is None or rep.Q1 is None:
        rep = curvature_invariants(c, rep)
    res: Dict[str, object] = {
        "omega11 + conj(omega11) = 0": (c.omega11 + conj.form(c.omega11)).reduced(),
        "psi = conj(psi)": (c.psi - conj.form(c.psi)).reduced(),
    }
    q = rel.reduce_scalar(rep.Q1 - conj.scalar(rep.Q2, rel))
    u = rel.reduce_scalar(rep.U1 + I * conj.scalar(rep.U2, rel))
    res["Q1 = conj(Q2)"] = _zero(q, rel)
    res["U1 = -i conj(U2)"] = _zero(u, rel)
    return RealityReport(premise, True, res,
                         {"Q1 = conj(Q2)": q, "U1 = -i conj(U2)": u})
