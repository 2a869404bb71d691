"""Command-line driver: ``flagcalc COMMAND FILE [--json] [--kill-fiber] [--volume=EXPR]``.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Dict, List, Optional

from . import __version__
from .catalog import full_report
from .dsl import InputDocument, parse_document, parse_expression
from .errors import FlagCalcError, InputError, ParseError, VerificationError
from .exterior import Form
from .matrix import BorelElement, assemble_pi, verify_gauge_covariance
from .reduction import (ConjugationSpec, CurvatureReport, PseudoFlagStructure,
                        check_cr_reality, reduce_pseudo_flag, verify_structure_equations,
                        curvature_coefficients, embed_to_connection)
from .scalar import Scalar

COMMANDS = ("check", "reduce", "curvature", "invariant", "gauge", "cr")
EXIT_OK, EXIT_VERIFY, EXIT_INPUT = 0, 1, 2


class _Failed(Exception):
    """A verification that ran to completion and found a nonzero residual."""


def _s(v) -> str:
    return str(v)


def _form_terms(f: Form) -> Dict[str, str]:
    return {"^".join(names): _s(c) for names, c in f.items()}


def _form_text(f: Form) -> str:
    return _s(f.reduced()) if f.terms else "0"


class Report:
    def __init__(self, command: str, digest: str):
        self.data: Dict[str, object] = {
            "tool_version": __version__,
            "input_digest": "sha256:" + digest,
            "command": command,
            "status": "ok",
            "stages": {},
            "scalars": {},
            "residuals": {},
        }
        self.failures: List[str] = []

    def stage(self, name: str, status: str = "ok"):
        self.data["stages"][name] = status

    def residual(self, label: str, value, ok: bool):
        self.data["residuals"][label] = _form_text(value) if isinstance(value, Form) else _s(value)
        if not ok:
            self.failures.append(f"{label}: residual {self.data['residuals'][label]}")

    def scalars(self, values: Dict[str, Scalar]):
        self.data["scalars"].update({k: _s(v) for k, v in values.items()})


# ---------------------------------------------------------------------------
# Pipeline pieces
# ---------------------------------------------------------------------------

def _frame(doc: InputDocument, rep: Report):
    frame, consistency = doc.build_frame()
    for label, res in consistency.residuals.items():
        rep.residual(f"d(d {label})", res, res.is_zero())
    if consistency.missing:
        raise InputError("missing differentials for: " + ", ".join(consistency.missing))
    rep.stage("frame", "ok" if consistency.usable else "failed")
    if not consistency.usable:
        raise _Failed("frame fails d^2 = 0: " + consistency.summary())
    return frame


def _structure(doc: InputDocument, frame) -> PseudoFlagStructure:
    if doc.pseudoflag is None:
        raise InputError("this command needs a [pseudoflag] block")
    pf = doc.pseudoflag.entries

    def form(key):
        src = pf[key]
        return parse_expression(src.text, frame=frame, as_form=True, line=src.line, col0=src.col)

    names = ("theta" if pf["contact"].text not in frame.index else pf["contact"].text,
             doc.pseudoflag.get("theta1", "theta1"), doc.pseudoflag.get("theta2", "theta2"))
    return PseudoFlagStructure(frame, form("contact"), form("Z1"), form("Z2"),
                               scale=pf["scale"].text, fiber=pf["fiber"].text, names=names)


def _pipeline(doc, rep: Report, kill_fiber=True) -> CurvatureReport:
    frame = _frame(doc, rep)
    p = _structure(doc, frame)
    try:
        out = full_report(p, kill_fiber=kill_fiber)
    except FlagCalcError as e:
        for s in _STAGES_DONE(getattr(e, "stage", None)):
            rep.stage(s)
        if getattr(e, "stage", None):
            rep.stage(e.stage, "failed")
        raise
    for k, v in out.stages.items():
        rep.stage(k, v)
    return out


def _STAGES_DONE(failed: Optional[str]):
    from .catalog import STAGES
    if failed is None or failed not in STAGES:
        return ()
    return STAGES[:STAGES.index(failed)]


def _structure_residuals(rep: Report, st):
    for k in sorted(st.residuals):
        r = st.residuals[k]
        rep.residual(k, r, r.is_zero())


def _checks(rep: Report, cr: CurvatureReport):
    rel = cr.relations
    for k, v in cr.checks.items():
        rep.residual(k, v, rel.is_zero(v) if rel.rules else not v)


def _integrand(rep: Report, cr: CurvatureReport, volume: Optional[Scalar]):
    it = cr.integrand
    form = it.form if volume is None else (it.form * volume).reduced()
    rep.data["integrand"] = {
        "transcendental_factor": it.transcendental_factor,
        "terms": _form_terms(form),
        "killed": list(it.killed),
    }
    if volume is not None:
        rep.data["integrand"]["volume"] = _s(volume)
    rep.residual("integrand - tr(pi^3)/3", (it.form - it.tc2_route).reduced(), it.agrees)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_check(doc, rep: Report, args):
    frame = _frame(doc, rep)
    if doc.pseudoflag is None:
        return
    p = _structure(doc, frame)
    r = reduce_pseudo_flag(p)
    rep.stage("reduce")
    cr = curvature_coefficients(r)
    rep.stage("curvature coefficients")
    c = embed_to_connection(r, cr)
    rep.stage("embedding")
    st = verify_structure_equations(c)
    rep.stage("structure equations", "ok" if st.ok else "failed")
    _structure_residuals(rep, st)


def cmd_reduce(doc, rep: Report, args):
    frame = _frame(doc, rep)
    p = _structure(doc, frame)
    r = reduce_pseudo_flag(p)
    rep.stage("reduce")
    rep.data["forms"] = {"theta11": _form_text(r.theta11), "tau1": _form_text(r.tau1),
                         "tau2": _form_text(r.tau2)}
    rep.scalars({k.replace("_", ""): v for k, v in r.z.items()})
    rep.scalars({"tau12": r.tau12, "tau21": r.tau21})
    for k, v in r.residuals().items():
        rep.residual(k, v, v.is_zero())


def cmd_curvature(doc, rep: Report, args):
    cr = _pipeline(doc, rep)
    rep.scalars(cr.scalars())
    rep.data["flat"] = bool(cr.flat)
    _structure_residuals(rep, cr.structure)
    _checks(rep, cr)
    b = cr.bianchi
    rep.data["bianchi"] = {k: _s(v) for k, v in b.coefficients.items()}
    for k, v in b.checks.items():
        rep.residual(k, v, b.relations.is_zero(v) if b.relations.rules else not v)
    for k, v in b.residuals.items():
        rep.residual(f"{k} identity", v, v.is_zero())
    _integrand(rep, cr, None)


def cmd_invariant(doc, rep: Report, args):
    cr = _pipeline(doc, rep, kill_fiber=args.kill_fiber)
    volume = None
    if args.volume is not None:
        frame = cr.reduction.xframe
        volume = parse_expression(args.volume, frame=frame)
        if not isinstance(volume, Scalar):
            raise InputError("--volume must be a scalar expression")
    rep.scalars({k: getattr(cr, k) for k in ("G", "R", "E1", "E2", "tau12", "tau21")})
    _integrand(rep, cr, volume)


def cmd_gauge(doc, rep: Report, args):
    cr = _pipeline(doc, rep)
    frame = cr.reduction.xframe
    vals = {}
    for k, src in doc.gauge.items():
        vals[k] = parse_expression(src.text, frame=frame, line=src.line, col0=src.col)
        if not isinstance(vals[k], Scalar):
            raise InputError(f"gauge parameter {k} must be a scalar")
    if not vals:
        raise InputError("the gauge command needs a [gauge] block")
    h = BorelElement(**vals)
    g = verify_gauge_covariance(assemble_pi(cr.connection), h)
    rep.stage("gauge", "ok" if g.ok else "failed")
    rep.data["gauge"] = {k: _s(v) for k, v in vals.items()}
    for k, v in g.line_residuals.items():
        rep.residual(f"{k} transformation", v, v.is_zero())
    rep.scalars({"Q1": g.Q1, "Q2": g.Q2, "Q1_transformed": g.Q1_transformed,
                 "Q2_transformed": g.Q2_transformed})
    rep.residual("Q1~ - alpha*beta^5*Q1", g.q1_residual, g._z(g.q1_residual))
    rep.residual("Q2~ - Q2/(alpha^5*beta)", g.q2_residual, g._z(g.q2_residual))


def cmd_cr(doc, rep: Report, args):
    cr = _pipeline(doc, rep)
    if not doc.conjugation:
        raise InputError("the cr command needs a [conjugation] block")
    frame = cr.reduction.xframe
    conj = ConjugationSpec.parse(frame, {k: s.text for k, s in doc.conjugation.items()})
    rr = check_cr_reality(cr.connection, conj, cr)
    rep.stage("reality", "ok" if rr.ok else "failed")
    rep.residual("omega2 - i*conj(omega1)", rr.premise, rr.premise_holds)
    rep.data["premise_holds"] = rr.premise_holds
    for k, v in rr.residuals.items():
        if isinstance(v, Form):
            rep.residual(k, v, v.is_zero())
    for k, v in rr.scalar_residuals.items():
        rep.residual(k, v, rr.residuals[k])
    rep.scalars({k: getattr(cr, k) for k in ("Q1", "Q2", "U1", "U2")})


_DISPATCH = {"check": cmd_check, "reduce": cmd_reduce, "curvature": cmd_curvature,
             "invariant": cmd_invariant, "gauge": cmd_gauge, "cr": cmd_cr}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def run(command: str, text: str, args) -> (Dict[str, object], int):
    """Run one command on document text; returns the report and exit code."""
    rep = Report(command, hashlib.sha256(text.encode("utf-8")).hexdigest())
    code = EXIT_OK
    try:
        doc = parse_document(text)
        _DISPATCH[command](doc, rep, args)
        if rep.failures:
            raise _Failed("; ".join(rep.failures))
    except ParseError as e:
        rep.data["status"] = "input_error"
        rep.data["error"] = _parse_message(e)
        code = EXIT_INPUT
    except InputError as e:
        rep.data["status"] = "input_error"
        rep.data["error"] = f"{type(e).__name__}: {e}"
        code = EXIT_INPUT
    except (VerificationError, _Failed) as e:
        rep.data["status"] = "verification_failure"
        msg = str(e)
        if rep.failures and not isinstance(e, _Failed):
            msg += "; " + "; ".join(rep.failures)
        rep.data["error"] = (f"{type(e).__name__}: " if not isinstance(e, _Failed) else "") + msg
        code = EXIT_VERIFY
    return rep.data, code


def _parse_message(e: ParseError) -> str:
    return f"{type(e).__name__}: {e}"


def render_text(data: Dict[str, object]) -> str:
    lines = []
    head = ("command", "status", "tool_version", "input_digest")
    width = max(len(k) for k in head)
    for k in head:
        lines.append(f"{k:<{width}}  {data[k]}")
    if "error" in data:
        lines.append(f"{'error':<{width}}  {data['error']}")
    for section in ("stages", "forms", "scalars", "bianchi", "gauge", "residuals"):
        body = data.get(section)
        if not body:
            continue
        lines.append("")
        lines.append(f"[{section}]")
        w = max(len(k) for k in body)
        for k, v in body.items():
            lines.append(f"  {k:<{w}}  {v}")
    if "flat" in data:
        lines.append("")
        lines.append(f"flat  {'true' if data['flat'] else 'false'}")
    if "integrand" in data:
        it = data["integrand"]
        lines.append("")
        lines.append(f"[integrand]  factor {it['transcendental_factor']}")
        if it.get("killed"):
            lines.append(f"  pulled back along {', '.join(it['killed'])} = 0")
        if "volume" in it:
            lines.append(f"  times volume {it['volume']}")
        if not it["terms"]:
            lines.append("  0")
        w = max((len(k) for k in it["terms"]), default=0)
        for k, v in it["terms"].items():
            lines.append(f"  {k:<{w}}  {v}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flagcalc",
                                 description="Exact flag-structure calculus on .flag documents.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("file", help="input .flag document ('-' for stdin)")
    ap.add_argument("--json", action="store_true", help="emit the report as JSON")
    ap.add_argument("--kill-fiber", action="store_true",
                    help="pull the integrand back to the constant-scale section")
    ap.add_argument("--volume", metavar="EXPR", default=None,
                    help="multiply the integrand by this scalar")
    ap.add_argument("--version", action="version", version=f"flagcalc {__version__}")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        if args.file == "-":
            text = sys.stdin.read()
        else:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
    except (OSError, UnicodeDecodeError) as e:
        print(f"flagcalc: cannot read {args.file}: {e}", file=sys.stderr)
        return EXIT_INPUT
    data, code = run(args.command, text, args)
    if args.json:
        sys.stdout.write(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(render_text(data))
    if code and not args.json:
        print(f"flagcalc: {data['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
