"""Concrete structures: invariant frames of Lie groups, the homogeneous
SU(2) family, a coordinate family for randomized checks, and the
end-to-end report."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, Optional, Sequence, Tuple

from .errors import (FlagCalcError, InputError, JacobiViolation, NotAPseudoFlag,
                     NotSupported)
from .exterior import FrameSpace, check_frame_consistency
from .reduction import (CurvatureReport, PseudoFlagStructure, bianchi_checks,
                        curvature_coefficients, curvature_invariants,
                        embed_to_connection, invariant_integrand, reduce_pseudo_flag,
                        verify_structure_equations)
from .scalar import ONE, ZERO, RelationSet, Scalar, as_scalar, symbol, symbol_id, symbol_name

__all__ = [
    "StructureConstants", "frame_from_structure_constants", "su2_constants",
    "abelian_constants", "SU2FamilyParams", "su2_family", "coordinate_pseudo_flag",
    "full_report", "STAGES", "fixture_text", "FIXTURES",
]

# fix the print order of the family's symbols before anything else registers
for _n in ("x", "y", "z", "r1", "r2", "s1", "s2", "a", "u", "v", "w"):
    symbol_id(_n)


@dataclass
class StructureConstants:
    """c[(i, j, k)] = c^i_{jk} with 1-based indices, antisymmetric in j, k.

    Only one of (i, j, k), (i, k, j) needs to be given; the other is filled in.
    """

    n: int
    c: Dict[Tuple[int, int, int], Scalar] = field(default_factory=dict)
    names: Optional[Sequence[str]] = None

    def __post_init__(self):
        full: Dict[Tuple[int, int, int], Scalar] = {}
        for (i, j, k), v in self.c.items():
            if not all(1 <= t <= self.n for t in (i, j, k)):
                raise InputError(f"index ({i}, {j}, {k}) out of range 1..{self.n}")
            v = as_scalar(v)
            if j == k:
                if v:
                    raise InputError(f"c^{i}_{j}{k} must vanish by antisymmetry")
                continue
            for key, val in (((i, j, k), v), ((i, k, j), -v)):
                if key in full and full[key] != val:
                    raise InputError(f"c^{i}_{j}{k} and c^{i}_{k}{j} are not antisymmetric")
                full[key] = val
        self.c = {k: v for k, v in full.items() if v}
        if self.names is None:
            self.names = tuple(f"sigma{i}" for i in range(1, self.n + 1))
        if len(self.names) != self.n:
            raise InputError("one name per basis form")

    def __getitem__(self, key) -> Scalar:
        return self.c.get(tuple(key), ZERO)


def su2_constants(names=("alpha", "beta", "gamma")) -> StructureConstants:
    """d alpha = -beta^gamma and cyclically."""
    return StructureConstants(3, {(1, 2, 3): ONE, (2, 3, 1): ONE, (3, 1, 2): ONE}, names)


def abelian_constants(n: int, names=None) -> StructureConstants:
    return StructureConstants(n, {}, names)


def _rules(sc: StructureConstants) -> Dict[str, str]:
    names = sc.names
    rules = {}
    for i in range(1, sc.n + 1):
        terms = []
        for j in range(1, sc.n + 1):
            for k in range(j + 1, sc.n + 1):
                v = sc[(i, j, k)]
                if v:
                    terms.append(f"({v})*{names[j - 1]}^{names[k - 1]}")
        rules[names[i - 1]] = f"-({' + '.join(terms)})" if terms else "0"
    return rules


def frame_from_structure_constants(sc: StructureConstants, constants=(), fiber=(),
                                   relations=(), extra_d=None, extra_basis=()) -> FrameSpace:
    """The left-invariant coframe with d sigma^i = -sum_{j<k} c^i_{jk} sigma^j ^ sigma^k.

    ``extra_basis`` and ``extra_d`` append further forms and coordinate
    differentials (used for the fiber direction of a pseudo-flag).
    """
    rules = _rules(sc)
    rules.update(extra_d or {})
    declared = set()
    for v in sc.c.values():
        declared |= {symbol_name(s) for s in v.symbols()}
    constants = list(constants) + sorted(declared - set(constants) - set(fiber),
                                         key=symbol_id)
    frame = FrameSpace.build(list(sc.names) + list(extra_basis), rules, constants, fiber,
                             relations, check=False)
    report = check_frame_consistency(frame)
    if not report.usable:
        raise JacobiViolation("structure constants violate the Jacobi identity: "
                              + report.summary())
    return frame


# ---------------------------------------------------------------------------
# The SU(2) family
# ---------------------------------------------------------------------------

def _scalar(v) -> Scalar:
    if isinstance(v, str):
        from .dsl import parse_scalar
        return parse_scalar(v)
    return as_scalar(v)


def _names_of(*vals: Scalar):
    out = set()
    for v in vals:
        out |= v.symbols()
    return [symbol_name(s) for s in sorted(out)]


@dataclass
class SU2FamilyParams:
    """Either x, y, z (with x^2 + yz = -1) or r1, r2, s1, s2 (with
    r1 s2 - r2 s1 = 1).  Omitting s2 eliminates it as (1 + r2 s1)/r1."""

    x: object = None
    y: object = None
    z: object = None
    r1: object = None
    r2: object = None
    s1: object = None
    s2: object = None

    @property
    def mode(self) -> str:
        xyz = [v is not None for v in (self.x, self.y, self.z)]
        rs = [v is not None for v in (self.r1, self.r2, self.s1)]
        if all(xyz) and not any(rs) and self.s2 is None:
            return "xyz"
        if all(rs) and not any(xyz):
            return "rs"
        raise InputError("give either x, y, z or r1, r2, s1 (and optionally s2)")


def su2_family(params: Optional[SU2FamilyParams] = None, **kw) -> PseudoFlagStructure:
    """The homogeneous pseudo-flag structure on SU(2) x (fiber) attached to a
    constant parameter.  The result carries ``params`` = {x, y, z}."""
    p = params if params is not None else SU2FamilyParams(**kw)
    if p.mode == "xyz":
        return _su2_xyz(_scalar(p.x), _scalar(p.y), _scalar(p.z))
    return _su2_rs(_scalar(p.r1), _scalar(p.r2), _scalar(p.s1),
                   None if p.s2 is None else _scalar(p.s2))


def _relation(poly: Scalar, what: str) -> RelationSet:
    if not poly:
        return RelationSet()
    if not poly.symbols():
        raise NotAPseudoFlag(f"parameters violate {what}")
    return RelationSet.from_polynomials([poly])


def _reject_fiber(vals, scale="a"):
    sid = symbol_id(scale)
    if any(sid in v.symbols() for v in vals):
        raise NotSupported("the parameter map must be constant; "
                           f"parameters may not depend on {scale}")


def _su2_xyz(x: Scalar, y: Scalar, z: Scalar) -> PseudoFlagStructure:
    _reject_fiber((x, y, z))
    rel = _relation(x * x + y * z + 1, "x^2 + y*z = -1")
    frame = FrameSpace.build(
        ["theta", "Z1", "Z2", "lam"],
        {"theta": "Z1^Z2",
         "Z1": f"theta^(({x})*Z1 + ({y})*Z2)",
         "Z2": f"theta^(({z})*Z1 - ({x})*Z2)",
         "a": "a*lam", "lam": "0"},
        constants=_names_of(x, y, z), fiber=["a"], relations=rel)
    th, Z1, Z2, _ = frame.basis_forms()
    out = PseudoFlagStructure(frame, th, Z1, Z2)
    out.params = {"x": x, "y": y, "z": z}
    return out


def _su2_rs(r1: Scalar, r2: Scalar, s1: Scalar, s2: Optional[Scalar]) -> PseudoFlagStructure:
    if s2 is None:
        if not r1:
            raise InputError("r1 = 0: s2 = (1 + r2*s1)/r1 is undefined; "
                             "give s2 explicitly or use the x, y, z parametrization")
        s2 = (1 + r2 * s1) / r1
        rel = RelationSet()
    else:
        rel = _relation(r1 * s2 - r2 * s1 - 1, "r1*s2 - r2*s1 = 1")
    _reject_fiber((r1, r2, s1, s2))
    sc = su2_constants()
    frame = frame_from_structure_constants(
        sc, constants=_names_of(r1, r2, s1, s2), fiber=["a"], relations=rel,
        extra_basis=["lam"], extra_d={"a": "a*lam", "lam": "0"})
    al, be, ga, _ = frame.basis_forms()
    Z1 = be * r1 + al * r2
    Z2 = be * s1 + al * s2
    out = PseudoFlagStructure(frame, ga, Z1, Z2)
    red = rel.reduce_scalar
    out.params = {"x": red(r1 * s1 + r2 * s2), "y": red(-(r1 * r1 + r2 * r2)),
                  "z": red(s1 * s1 + s2 * s2)}
    return out


def coordinate_pseudo_flag(f, g, constants=()) -> PseudoFlagStructure:
    """theta = dw - v du, Z1 = (1 + f g) du + f dv, Z2 = g du + dv for
    functions f, g of the coordinates u, v, w; every such triple satisfies
    dtheta = Z1 ^ Z2."""
    f, g = _scalar(f), _scalar(g)
    frame = FrameSpace.build(
        ["du", "dv", "dw", "lam"],
        {"du": "0", "dv": "0", "dw": "0", "lam": "0",
         "u": "du", "v": "dv", "w": "dw", "a": "a*lam"},
        constants=list(constants), fiber=["u", "v", "w", "a"])
    du, dv, dw, _ = frame.basis_forms()
    v = symbol("v")
    theta = dw - du * v
    Z1 = du * (1 + f * g) + dv * f
    Z2 = du * g + dv
    return PseudoFlagStructure(frame, theta, Z1, Z2)


# ---------------------------------------------------------------------------
# End to end
# ---------------------------------------------------------------------------

STAGES = ("reduce", "curvature coefficients", "embedding", "structure equations",
          "invariants", "bianchi", "integrand")


def full_report(p: PseudoFlagStructure, kill_fiber: bool = True) -> CurvatureReport:
    """Run every pipeline stage.  A failing stage re-raises its error with
    the attribute ``stage`` set and the stage name prefixed to the message."""
    stages: Dict[str, str] = {}
    state: Dict[str, object] = {}

    def run(name, fn):
        try:
            out = fn()
        except FlagCalcError as e:
            e.stage = name
            if e.args:
                e.args = (f"{name}: {e.args[0]}",) + e.args[1:]
            raise
        stages[name] = "ok"
        return out

    r = run("reduce", lambda: reduce_pseudo_flag(p))
    rep = run("curvature coefficients", lambda: curvature_coefficients(r))
    c = run("embedding", lambda: embed_to_connection(r, rep))

    def structure():
        st = verify_structure_equations(c)
        if not st.ok:
            from .errors import ShapeViolation
            raise ShapeViolation("; ".join(st.describe_failures()))
        return st

    st = run("structure equations", structure)
    run("invariants", lambda: curvature_invariants(c, rep, st))
    run("bianchi", lambda: bianchi_checks(c, rep))
    run("integrand", lambda: invariant_integrand(c, rep, r, kill_fiber))
    rep.reduction, rep.connection, rep.structure = r, c, st
    rep.stages = stages
    return rep


FIXTURES = ("su2.flag", "su2_x0.flag", "abelian.flag")


def fixture_text(name: str) -> str:
    """Text of a shipped ``.flag`` fixture."""
    if name not in FIXTURES:
        raise InputError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return resources.files("flagcalc").joinpath("data", name).read_text(encoding="utf-8")
