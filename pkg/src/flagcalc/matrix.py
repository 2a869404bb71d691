"""sl(3, C)-valued forms: the connection matrix, its curvature, the Borel
gauge action and the Chern-Simons type transgression form."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import FrameMismatch, NonInvertible, ShapeViolation
from .exterior import (Form, FrameSpace, coefficient, decompose,
                       exterior_derivative, wedge)
from .scalar import ONE, ZERO, RelationSet, Scalar, as_scalar, symbol
from fractions import Fraction

__all__ = [
    "SLOTS", "ConnectionForms", "MatrixForm", "assemble_pi", "curvature",
    "CurvatureComponents", "extract_components", "BorelElement",
    "gauge_transform", "gauge_prediction", "GaugeReport", "verify_gauge_covariance",
    "TC2", "tc2", "trace_expansion", "SectionReport", "section_dependence_check",
    "j_homomorphism", "abstract_connection",
]

SLOTS = ("omega", "omega1", "omega2", "phi", "omega11", "phi1", "phi2", "psi")

HALF = as_scalar(Fraction(1, 2))
THIRD = as_scalar(Fraction(1, 3))


@dataclass(frozen=True)
class ConnectionForms:
    """The eight connection 1-forms on one frame."""

    omega: Form
    omega1: Form
    omega2: Form
    phi: Form
    omega11: Form
    phi1: Form
    phi2: Form
    psi: Form

    def __post_init__(self):
        frame = self.omega.frame
        for name in SLOTS:
            f = getattr(self, name)
            if f.frame is not frame:
                raise FrameMismatch(f"connection form {name} lives on another frame")
            if f.degree != 1 and f.terms:
                raise ShapeViolation(f"connection form {name} is not a 1-form")
            if f.degree != 1:
                object.__setattr__(self, name, frame.zero(1))

    @property
    def frame(self) -> FrameSpace:
        return self.omega.frame

    def as_dict(self) -> Dict[str, Form]:
        return {n: getattr(self, n) for n in SLOTS}

    def map(self, fn) -> "ConnectionForms":
        return ConnectionForms(**{n: fn(getattr(self, n)) for n in SLOTS})

    @classmethod
    def from_matrix(cls, m: "MatrixForm") -> "ConnectionForms":
        """Read the slots back out of a connection-shaped matrix."""
        e = m.entry
        return cls(
            omega=e(3, 1) * HALF,
            omega1=e(2, 1),
            omega2=e(3, 2) * HALF,
            phi=e(3, 3) - e(1, 1),
            omega11=e(2, 2) * as_scalar(Fraction(3, 2)),
            phi1=e(2, 3) * 2,
            phi2=-e(1, 2),
            psi=e(1, 3) * -4,
        )


def abstract_connection(extra_constants=(), relations: Optional[RelationSet] = None
                        ) -> ConnectionForms:
    """Eight independent basis 1-forms as a connection on an 8-dim frame with
    no differentials; used for purely algebraic identities."""
    frame = FrameSpace(list(SLOTS), extra_constants, (), relations)
    return ConnectionForms(*frame.basis_forms())


class MatrixForm:
    """3x3 matrix of forms of one degree; ``entry(i, j)`` is 1-based."""

    __slots__ = ("rows", "frame", "degree")

    def __init__(self, rows: Sequence[Sequence[Form]]):
        rows = tuple(tuple(r) for r in rows)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ShapeViolation("matrix forms are 3x3")
        frame = rows[0][0].frame
        degs = set()
        for r in rows:
            for f in r:
                if f.frame is not frame:
                    raise FrameMismatch("matrix entries live on different frames")
                if f.terms:
                    degs.add(f.degree)
        if len(degs) > 1:
            raise ShapeViolation("matrix entries have mixed degrees")
        degree = degs.pop() if degs else rows[0][0].degree
        self.rows = tuple(tuple(f if f.degree == degree else frame.zero(degree) for f in r)
                          for r in rows)
        self.frame = frame
        self.degree = degree

    def entry(self, i: int, j: int) -> Form:
        return self.rows[i - 1][j - 1]

    def trace(self) -> Form:
        return self.rows[0][0] + self.rows[1][1] + self.rows[2][2]

    def d(self) -> "MatrixForm":
        return MatrixForm([[exterior_derivative(f) for f in r] for r in self.rows])

    def wedge(self, o: "MatrixForm") -> "MatrixForm":
        if o.frame is not self.frame:
            raise FrameMismatch("matrix forms on different frames")
        deg = self.degree + o.degree
        out = []
        for i in range(3):
            row = []
            for j in range(3):
                acc = self.frame.zero(deg)
                for k in range(3):
                    acc = acc + wedge(self.rows[i][k], o.rows[k][j])
                row.append(acc)
            out.append(row)
        return MatrixForm(out)

    def __add__(self, o: "MatrixForm") -> "MatrixForm":
        return MatrixForm([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, o.rows)])

    def __sub__(self, o: "MatrixForm") -> "MatrixForm":
        return MatrixForm([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, o.rows)])

    def left(self, m: Sequence[Sequence[Scalar]]) -> "MatrixForm":
        """Scalar matrix times this matrix."""
        out = []
        for i in range(3):
            row = []
            for j in range(3):
                acc = self.frame.zero(self.degree)
                for k in range(3):
                    if m[i][k]:
                        acc = acc + self.rows[k][j] * m[i][k]
                row.append(acc)
            out.append(row)
        return MatrixForm(out)

    def right(self, m: Sequence[Sequence[Scalar]]) -> "MatrixForm":
        """This matrix times a scalar matrix."""
        out = []
        for i in range(3):
            row = []
            for j in range(3):
                acc = self.frame.zero(self.degree)
                for k in range(3):
                    if m[k][j]:
                        acc = acc + self.rows[i][k] * m[k][j]
                row.append(acc)
            out.append(row)
        return MatrixForm(out)

    def map(self, fn) -> "MatrixForm":
        return MatrixForm([[fn(f) for f in r] for r in self.rows])

    def is_zero(self, relations: Optional[RelationSet] = None) -> bool:
        return all(f.is_zero(relations) for r in self.rows for f in r)

    def nonzero_entries(self) -> List[Tuple[int, int]]:
        return [(i + 1, j + 1) for i in range(3) for j in range(3)
                if not self.rows[i][j].is_zero()]

    def __str__(self):
        return "\n".join(" | ".join(str(f) for f in r) for r in self.rows)


def scalar_matrix_form(frame: FrameSpace, m: Sequence[Sequence[Scalar]]) -> MatrixForm:
    return MatrixForm([[frame.scalar_form(v) for v in r] for r in m])


def assemble_pi(c: ConnectionForms) -> MatrixForm:
    """The traceless connection matrix built from the eight slots.

    Entry (1,2) is -phi2: with this sign d pi + pi^pi vanishes below the
    diagonal exactly when the structure equations hold.
    """
    w11 = c.omega11
    return MatrixForm([
        [-c.phi * HALF - w11 * THIRD, -c.phi2, c.psi * as_scalar(Fraction(-1, 4))],
        [c.omega1, w11 * as_scalar(Fraction(2, 3)), c.phi1 * HALF],
        [c.omega * 2, c.omega2 * 2, c.phi * HALF - w11 * THIRD],
    ])


def curvature(pi: MatrixForm) -> MatrixForm:
    """Pi = d pi + pi ^ pi."""
    return pi.d() + pi.wedge(pi)


@dataclass
class CurvatureComponents:
    Phi1: Form
    Phi2: Form
    Psi: Form
    Q1: Scalar
    Q2: Scalar
    U1: Scalar
    U2: Scalar

    @property
    def flat(self) -> bool:
        rel = self.Phi1.frame.relations
        return all(rel.is_zero(v) if rel.rules else not v
                   for v in (self.Q1, self.Q2, self.U1, self.U2))


def extract_components(Pi: MatrixForm, pi: MatrixForm) -> CurvatureComponents:
    """Split the curvature of a flag connection into Q1, Q2, U1, U2.

    The 2-forms omega^omega2 etc. are taken from the connection ``pi`` so
    the result does not depend on how the frame's basis is chosen.
    """
    allowed = {(1, 2), (1, 3), (2, 3)}
    bad = [ij for ij in Pi.nonzero_entries() if ij not in allowed]
    if bad:
        raise ShapeViolation("curvature has nonzero entries at "
                             + ", ".join(f"({i},{j})" for i, j in bad))
    c = ConnectionForms.from_matrix(pi)
    Phi1 = Pi.entry(2, 3) * 2
    Phi2 = -Pi.entry(1, 2)
    Psi = Pi.entry(1, 3) * -4
    (q1,), r1 = decompose(Phi1, [wedge(c.omega, c.omega2)])
    (q2,), r2 = decompose(Phi2, [wedge(c.omega, c.omega1)])
    (u1, u2), r3 = decompose(Psi, [wedge(c.omega1, c.omega), wedge(c.omega2, c.omega)])
    for label, r in (("Phi1", r1), ("Phi2", r2), ("Psi", r3)):
        if not r.is_zero():
            raise ShapeViolation(f"{label} has terms outside its allowed shape: {r}")
    rel = Pi.frame.relations
    red = (lambda s: rel.reduce_scalar(s)) if rel.rules else (lambda s: s)
    return CurvatureComponents(Phi1, Phi2, Psi, red(q1), red(q2), red(u1), red(u2))


# ---------------------------------------------------------------------------
# The Borel group
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BorelElement:
    """[[alpha, gamma, epsilon], [0, 1/(alpha beta), delta], [0, 0, beta]]."""

    alpha: Scalar = ONE
    beta: Scalar = ONE
    gamma: Scalar = ZERO
    delta: Scalar = ZERO
    epsilon: Scalar = ZERO

    def __post_init__(self):
        for n in ("alpha", "beta", "gamma", "delta", "epsilon"):
            object.__setattr__(self, n, as_scalar(getattr(self, n)))

    @classmethod
    def generic(cls, names=("alpha", "beta", "gamma", "delta", "epsilon")) -> "BorelElement":
        return cls(*(symbol(n) for n in names))

    def check_invertible(self, relations: Optional[RelationSet] = None) -> None:
        for n in ("alpha", "beta"):
            v = getattr(self, n)
            zero = relations.is_zero(v) if relations is not None and relations.rules else not v
            if zero:
                raise NonInvertible(f"{n} vanishes, so the element is not invertible")

    def matrix(self) -> List[List[Scalar]]:
        a, b = self.alpha, self.beta
        return [[a, self.gamma, self.epsilon],
                [ZERO, (a * b).inverse(), self.delta],
                [ZERO, ZERO, b]]

    def inverse_matrix(self) -> List[List[Scalar]]:
        a, b, c, d, e = self.alpha, self.beta, self.gamma, self.delta, self.epsilon
        return [[a.inverse(), -c * b, c * d - e / (a * b)],
                [ZERO, a * b, -a * d],
                [ZERO, ZERO, b.inverse()]]

    def __mul__(self, o: "BorelElement") -> "BorelElement":
        m = _matmul(self.matrix(), o.matrix())
        return BorelElement(m[0][0], m[2][2], m[0][1], m[1][2], m[0][2])

    def inverse(self) -> "BorelElement":
        m = self.inverse_matrix()
        return BorelElement(m[0][0], m[2][2], m[0][1], m[1][2], m[0][2])


def _matmul(x, y):
    n, k, m = len(x), len(y), len(y[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = ZERO
            for t in range(k):
                if x[i][t] and y[t][j]:
                    acc = acc + x[i][t] * y[t][j]
            row.append(acc)
        out.append(row)
    return out


def _dh(frame: FrameSpace, h: BorelElement) -> Optional[MatrixForm]:
    """Entrywise differential of h, or None when every entry is constant."""
    fib = set(frame.fiber_ids)
    m = h.matrix()
    if not any(v.symbols() & fib for r in m for v in r):
        return None
    return MatrixForm([[frame._d_scalar(v) for v in r] for r in m])


def gauge_transform(pi: MatrixForm, h: BorelElement) -> MatrixForm:
    """h^-1 dh + h^-1 pi h."""
    h.check_invertible(pi.frame.relations)
    hinv = h.inverse_matrix()
    out = pi.left(hinv).right(h.matrix())
    dh = _dh(pi.frame, h)
    if dh is not None:
        out = out + dh.left(hinv)
    rel = pi.frame.relations
    return out.map(lambda f: f.reduced(rel)) if rel.rules else out


def gauge_prediction(c: ConnectionForms, h: BorelElement) -> Dict[str, Form]:
    """The closed-form transformation law of the eight slots under a constant h."""
    a, b, g, d, e = h.alpha, h.beta, h.gamma, h.delta, h.epsilon
    w, w1, w2, p = c.omega, c.omega1, c.omega2, c.phi
    w11, p1, p2, s = c.omega11, c.phi1, c.phi2, c.psi
    ab = a * b
    return {
        "omega": w * (a / b),
        "omega1": w1 * (a * a * b) - w * (2 * d * a * a),
        "omega2": w2 / (a * b * b) + w * (g / b),
        "phi": p + w1 * (ab * g) + w2 * (2 * d / b) + w * (4 * e / b - 2 * d * a * g),
        "omega11": (w11 + w1 * (as_scalar(Fraction(3, 2)) * ab * g) - w2 * (3 * d / b)
                    - w * (3 * d * a * g)),
        "phi1": (p1 * (b * b * a) + w11 * (2 * d * ab) - p * (ab * d) + w1 * (2 * ab * e)
                 - w2 * (4 * d * d * a) - w * (4 * d * a * e)),
        "phi2": (p2 / (b * a * a) + w11 * (g / a) + p * (g / (2 * a)) + w1 * (b * g * g)
                 + w2 * (2 * e / (ab * ab) - 2 * g * d / ab) + w * (2 * g * e / ab - 2 * d * g * g)),
        "psi": (s * (b / a) + p * (4 * e / a - 2 * b * g * d) + w1 * (4 * b * g * e)
                + w2 * (8 * d * e / ab - 8 * g * d * d) + p1 * (2 * g * b * b) + p2 * (4 * d / a)
                + w11 * (4 * d * b * g) + w * (8 * e * e / ab - 8 * d * g * e)),
    }


@dataclass
class GaugeReport:
    line_residuals: Dict[str, Form]
    Q1: Scalar
    Q2: Scalar
    Q1_transformed: Scalar
    Q2_transformed: Scalar
    q1_residual: Scalar
    q2_residual: Scalar
    relations: RelationSet = field(repr=False, default=None)

    def _z(self, s):
        return self.relations.is_zero(s) if self.relations is not None and self.relations.rules else not s

    @property
    def lines_ok(self) -> Dict[str, bool]:
        return {k: r.is_zero() for k, r in self.line_residuals.items()}

    @property
    def ok(self) -> bool:
        return (all(self.lines_ok.values()) and self._z(self.q1_residual)
                and self._z(self.q2_residual))


def verify_gauge_covariance(pi: MatrixForm, h: BorelElement) -> GaugeReport:
    """Compare the transformed connection with the closed-form law for each
    slot, and check the Q-scaling of the transformed curvature."""
    c = ConnectionForms.from_matrix(pi)
    new_pi = gauge_transform(pi, h)
    got = ConnectionForms.from_matrix(new_pi).as_dict()
    expected = gauge_prediction(c, h)
    residuals = {k: (got[k] - expected[k]).reduced() for k in SLOTS}
    comp = extract_components(curvature(pi), pi)
    new_comp = extract_components(curvature(new_pi), new_pi)
    a, b = h.alpha, h.beta
    r1 = new_comp.Q1 - a * b ** 5 * comp.Q1
    r2 = new_comp.Q2 - comp.Q2 / (a ** 5 * b)
    return GaugeReport(residuals, comp.Q1, comp.Q2, new_comp.Q1, new_comp.Q2, r1, r2,
                       pi.frame.relations)


# ---------------------------------------------------------------------------
# Transgression form
# ---------------------------------------------------------------------------

@dataclass
class TC2:
    """T = tr(pi^pi^pi)/24, so that TC2 = T / pi^2 (the factor stays symbolic)."""

    form: Form
    trace_cubed: Form
    tr_Pi_pi: Form
    d_trace_cubed: Optional[Form]
    transcendental_factor: str = "1/pi^2"

    @property
    def ok(self) -> bool:
        closed = self.d_trace_cubed is None or self.d_trace_cubed.is_zero()
        return self.tr_Pi_pi.is_zero() and closed


def trace_cubed(pi: MatrixForm) -> Form:
    return pi.wedge(pi).wedge(pi).trace()


def tc2(pi: MatrixForm) -> TC2:
    t3 = trace_cubed(pi)
    if pi.frame.usable:
        Pi = curvature(pi)
        tr_pp = Pi.wedge(pi).trace()
        dt = exterior_derivative(t3)
    else:
        tr_pp = pi.frame.zero(3)
        dt = None
    return TC2(t3 * as_scalar(Fraction(1, 24)), t3, tr_pp.reduced(), dt.reduced() if dt else None)


def trace_expansion(c: ConnectionForms) -> Form:
    """Closed-form expansion of tr(pi^pi^pi) in the eight slots."""
    w, w1, w2, p = c.omega, c.omega1, c.omega2, c.phi
    w11, p1, p2, s = c.omega11, c.phi1, c.phi2, c.psi
    return (wedge(wedge(w, p) + wedge(w1, w2), s) * as_scalar(Fraction(3, 2))
            + wedge(wedge(w, p1), p2) * 3
            + wedge(wedge(w1, p * HALF + w11), p2) * 3
            - wedge(wedge(w2, p * HALF - w11), p1) * 3)


@dataclass
class SectionReport:
    cube_term: Form
    exactness_residual: Form
    difference: Form
    exact_part: Form
    constant: Optional[Scalar]
    change_residual: Optional[Form]

    @property
    def ok(self) -> bool:
        return (self.cube_term.is_zero() and self.exactness_residual.is_zero()
                and self.change_residual is not None and self.change_residual.is_zero())


def section_dependence_check(pi: MatrixForm, h: BorelElement,
                             expected_constant: Scalar = as_scalar(-3)) -> SectionReport:
    """Change of section by h: the difference of tr(pi^3) is exact.

    Finds the constant k with tr(pi~^3) - tr(pi^3) = k d tr(h^-1 pi ^ dh) and
    checks it against ``expected_constant``.
    """
    frame = pi.frame
    hm = h.matrix()
    hinv = h.inverse_matrix()
    dh = _dh(frame, h) or MatrixForm([[frame.zero(1)] * 3 for _ in range(3)])
    dhinv = MatrixForm([[frame._d_scalar(v) for v in r] for r in hinv])
    hinv_dh = dh.left(hinv)
    cube_term = hinv_dh.wedge(dhinv).wedge(dh).trace().reduced()
    hinv_pi = pi.left(hinv)
    inner = hinv_pi.wedge(dh).trace()
    d_inner = exterior_derivative(inner)
    rhs_exact = (dhinv.wedge(pi).wedge(dh) - hinv_pi.wedge(pi).wedge(dh)).trace()
    exactness_residual = (d_inner - rhs_exact).reduced()
    new_pi = gauge_transform(pi, h)
    diff = (trace_cubed(new_pi) - trace_cubed(pi)).reduced()
    d_inner = d_inner.reduced()
    constant = None
    if d_inner.is_zero():
        constant = expected_constant if diff.is_zero() else None
    else:
        (k,), _ = decompose(diff, [d_inner])
        constant = k
    residual = (diff - d_inner * expected_constant).reduced()
    return SectionReport(cube_term, exactness_residual, diff, d_inner, constant, residual)


# ---------------------------------------------------------------------------
# The homomorphism B -> H
# ---------------------------------------------------------------------------

def j_homomorphism(b: BorelElement, relations: Optional[RelationSet] = None
                   ) -> List[List[Scalar]]:
    """4x4 image of a Borel element in the coframe structure group.

    Row-vector convention: the new coframe (omega, omega1, omega2, phi) is the
    old one times this matrix.
    """
    b.check_invertible(relations)
    a, bb, c, d, e = b.alpha, b.beta, b.gamma, b.delta, b.epsilon
    m = [[a / bb, -2 * a * a * d, c / bb, 4 * e / bb - 2 * a * c * d],
         [ZERO, a * a * bb, ZERO, a * bb * c],
         [ZERO, ZERO, (a * bb * bb).inverse(), 2 * d / bb],
         [ZERO, ZERO, ZERO, ONE]]
    if relations is not None and relations.rules:
        m = [[relations.reduce_scalar(v) for v in r] for r in m]
    return m
