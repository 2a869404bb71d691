"""The ``.flag`` input language: expressions and documents.

Expression grammar, loosest binding first::

    sum     := wedge (('+' | '-') wedge)*
    wedge   := product ('^' product)*
    product := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := atom ('^' ['-'] INT)?
    atom    := INT | INT '/' INT | NAME | '(' sum ')'

A ``^`` directly followed by an integer literal is a power; any other ``^``
is the wedge product.  ``i`` is the imaginary unit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from .errors import (DegreeMismatch, DuplicateDeclaration, FlagCalcError,
                     ParseError, UndeclaredName)
from .scalar import I, ONE, Scalar, as_scalar, symbol, symbol_id

__all__ = ["parse_expression", "parse_scalar", "parse_document", "InputDocument",
           "PseudoFlagBlock", "format_scalar"]

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<int>\d+)
  | (?P<name>[^\W\d]\w*)
  | (?P<op>[-+*/^()=,])
""", re.VERBOSE | re.UNICODE)


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> List[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append(_Tok(kind, m.group(), col0 + pos))
        pos = m.end()
    out.append(_Tok("end", "", col0 + len(text)))
    return out


class _Parser:
    def __init__(self, text, resolve, line=1, col0=1):
        self.toks = _tokenize(text, line, col0)
        self.pos = 0
        self.line = line
        self.resolve = resolve

    def peek(self, k=0):
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def take(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def error(self, msg, expected=(), tok=None, cls=ParseError):
        tok = tok or self.peek()
        return cls(msg, self.line, tok.col, expected)

    def expect_op(self, op):
        t = self.peek()
        if t.kind == "op" and t.text == op:
            return self.take()
        raise self.error(f"unexpected {t.text or 'end of input'!r}", (repr(op),))

    def parse(self):
        v = self.sum()
        t = self.peek()
        if t.kind != "end":
            raise self.error(f"unexpected {t.text!r}", ("operator", "end of input"))
        return v

    def _is(self, *ops):
        t = self.peek()
        return t.kind == "op" and t.text in ops

    def sum(self):
        v = self.wedge()
        while self._is("+", "-"):
            op = self.take()
            w = self.wedge()
            v = self._apply(op, v, w)
        return v

    def _power_follows(self):
        if not self._is("^"):
            return False
        n = self.peek(1)
        if n.kind == "int":
            return True
        return n.kind == "op" and n.text == "-" and self.peek(2).kind == "int"

    def wedge(self):
        v = self.product()
        while self._is("^") and not self._power_follows():
            op = self.take()
            w = self.product()
            v = self._apply(op, v, w)
        return v

    def product(self):
        v = self.unary()
        while self._is("*", "/"):
            op = self.take()
            w = self.unary()
            v = self._apply(op, v, w)
        return v

    def unary(self):
        if self._is("-"):
            self.take()
            return -self.unary()
        if self._is("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        v = self.atom()
        if self._power_follows():
            op = self.take()
            neg = False
            if self._is("-"):
                self.take()
                neg = True
            n = int(self.take().text)
            if not isinstance(v, Scalar):
                raise self.error("only scalars can be raised to a power", tok=op)
            v = v ** (-n if neg else n)
        return v

    def atom(self):
        t = self.peek()
        if t.kind == "int":
            self.take()
            return as_scalar(int(t.text))
        if t.kind == "name":
            self.take()
            try:
                return self.resolve(t.text)
            except UndeclaredName as e:
                raise UndeclaredName(str(e.args[0]) if e.args else t.text,
                                     self.line, t.col) from None
        if self._is("("):
            self.take()
            v = self.sum()
            self.expect_op(")")
            return v
        raise self.error(f"unexpected {t.text or 'end of input'!r}",
                         ("number", "name", "'('", "'-'"))

    def _apply(self, op, a, b):
        from .exterior import Form, wedge
        o = op.text
        try:
            if o == "+":
                return a + b
            if o == "-":
                return a - b
            if o == "*":
                if isinstance(a, Form) and isinstance(b, Form) and a.degree and b.degree:
                    raise self.error("use '^' for the wedge of two forms", tok=op)
                return a * b
            if o == "/":
                if isinstance(b, Form):
                    if b.degree:
                        raise self.error("cannot divide by a form", tok=op)
                    b = b.scalar()
                return a / b
            if o == "^":
                if isinstance(a, Form) and isinstance(b, Form):
                    return wedge(a, b)
                if isinstance(a, Form) or isinstance(b, Form):
                    return a * b
                raise self.error("'^' between scalars needs an integer exponent", tok=op)
        except ParseError:
            raise
        except FlagCalcError as e:
            raise ParseError(str(e), self.line, op.col) from None
        raise AssertionError(o)


def _make_resolver(frame=None, declared=None, extra: Optional[Mapping[str, object]] = None):
    def resolve(name):
        if extra and name in extra:
            return extra[name]
        if frame is not None and name in frame.index:
            return frame.basis_form(name)
        if name == "i":
            return I
        if declared is not None and name not in declared:
            raise UndeclaredName(f"undeclared name {name!r}")
        return symbol(name)
    return resolve


def parse_expression(text: str, frame=None, declared=None, as_form: bool = False,
                     line: int = 1, col0: int = 1, extra=None):
    """Parse ``text`` to a Scalar or (when it mentions basis forms) a Form.

    ``declared`` restricts the admissible symbol names; by default the
    frame's declared symbols are used when a frame is given.
    """
    if declared is None and frame is not None:
        from .scalar import symbol_name
        declared = {symbol_name(s) for s in frame.declared_symbols}
    v = _Parser(text, _make_resolver(frame, declared, extra), line, col0).parse()
    if as_form and isinstance(v, Scalar):
        if frame is None:
            raise ParseError("a frame is required to build a form", line, col0)
        v = frame.scalar_form(v)
    return v


def parse_scalar(text: str, declared=None, line: int = 1, col0: int = 1) -> Scalar:
    v = parse_expression(text, declared=declared, line=line, col0=col0)
    if not isinstance(v, Scalar):
        raise DegreeMismatch("expected a scalar expression")
    return v


def format_scalar(s: Scalar) -> str:
    """Canonical text of a Scalar; it reparses to an equal value."""
    return str(s)


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------

SECTIONS = ("frame", "coordinates", "constants", "relations", "differentials",
            "pseudoflag", "conjugation", "gauge")
PSEUDOFLAG_KEYS = ("contact", "Z1", "Z2", "scale", "fiber", "theta1", "theta2")
GAUGE_ALIASES = {"a": "alpha", "b": "beta", "c": "gamma", "d": "delta", "e": "epsilon"}
GAUGE_KEYS = ("alpha", "beta", "gamma", "delta", "epsilon")


@dataclass
class _Src:
    text: str
    line: int
    col: int


@dataclass
class PseudoFlagBlock:
    entries: Dict[str, _Src]

    def get(self, key, default=None):
        e = self.entries.get(key)
        return e.text if e is not None else default


@dataclass
class InputDocument:
    """A parsed ``.flag`` file; expressions stay as located source text until
    the frame they live on exists."""

    basis: List[str] = field(default_factory=list)
    fiber: List[str] = field(default_factory=list)
    constants: List[str] = field(default_factory=list)
    relations: List[_Src] = field(default_factory=list)
    differentials: Dict[str, _Src] = field(default_factory=dict)
    pseudoflag: Optional[PseudoFlagBlock] = None
    conjugation: Dict[str, _Src] = field(default_factory=dict)
    gauge: Dict[str, _Src] = field(default_factory=dict)
    sections: List[str] = field(default_factory=list)

    gauge_symbols: List[str] = field(default_factory=list)

    @property
    def symbols(self) -> List[str]:
        return self.constants + self.fiber

    def build_frame(self):
        """Construct the declared frame and run its consistency check; the
        report is returned alongside (an inconsistent frame is not raised)."""
        from .exterior import FrameSpace, check_frame_consistency
        from .scalar import RelationSet
        declared = set(self.symbols)
        rel = RelationSet.from_polynomials(
            [parse_scalar(r.text, declared, r.line, r.col) for r in self.relations])
        frame = FrameSpace(self.basis, self.constants + self.gauge_symbols, self.fiber, rel)
        rules = {}
        for name, src in self.differentials.items():
            rules[name] = parse_expression(src.text, frame=frame, as_form=True,
                                           line=src.line, col0=src.col)
        frame.set_differentials(rules)
        return frame, check_frame_consistency(frame)


_SECTION = re.compile(r"^\[\s*(\w+)\s*\]$")
_DIFF = re.compile(r"^d\s+([^\W\d]\w*)\s*=\s*(.*)$", re.UNICODE)
_KEYVAL = re.compile(r"^([^\W\d]\w*)\s*[=:]\s*(.*)$", re.UNICODE)
_NAME = re.compile(r"^[^\W\d]\w*$", re.UNICODE)


def _names(body: str, line: int, col: int) -> List[Tuple[str, int]]:
    out = []
    for m in re.finditer(r"[^\s,]+", body):
        w = m.group()
        if not _NAME.match(w):
            raise ParseError(f"invalid name {w!r}", line, col + m.start(), ("identifier",))
        out.append((w, col + m.start()))
    return out


def parse_document(text: str) -> InputDocument:
    """Parse a ``.flag`` document.  Names used in expressions are checked
    against the declarations; differentials may appear in any section order."""
    doc = InputDocument()
    section = None
    seen_names: Dict[str, str] = {}
    exprs: List[Tuple[str, _Src]] = []

    def declare(name, what, line, col):
        if name == "i":
            raise ParseError("'i' is reserved for the imaginary unit", line, col)
        if name in seen_names:
            raise DuplicateDeclaration(
                f"{name!r} already declared as {seen_names[name]}", line, col)
        seen_names[name] = what

    for ln, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        body = stripped.lstrip()
        if not body:
            continue
        col = len(stripped) - len(body) + 1
        m = _SECTION.match(body)
        if m:
            section = m.group(1)
            if section not in SECTIONS:
                raise ParseError(f"unknown section [{section}]", ln, col,
                                 tuple(f"[{s}]" for s in SECTIONS))
            if section in doc.sections:
                raise DuplicateDeclaration(f"section [{section}] appears twice", ln, col)
            doc.sections.append(section)
            if section == "pseudoflag":
                doc.pseudoflag = PseudoFlagBlock({})
            continue
        if section is None:
            raise ParseError("content before the first section header", ln, col,
                             tuple(f"[{s}]" for s in SECTIONS))
        if section == "frame":
            for n, c in _names(body, ln, col):
                declare(n, "basis form", ln, c)
                doc.basis.append(n)
        elif section == "constants":
            for n, c in _names(body, ln, col):
                declare(n, "constant", ln, c)
                doc.constants.append(n)
        elif section == "coordinates":
            parts = _names(body, ln, col)
            if len(parts) < 2 or parts[-1][0] not in ("fiber", "constant"):
                raise ParseError("expected 'NAME... fiber' or 'NAME... constant'",
                                 ln, col, ("fiber", "constant"))
            kind = parts[-1][0]
            for n, c in parts[:-1]:
                declare(n, kind, ln, c)
                (doc.fiber if kind == "fiber" else doc.constants).append(n)
        elif section == "relations":
            if "=" in body:
                lhs, rhs = body.split("=", 1)
                src = _Src(f"({lhs}) - ({rhs})", ln, col)
                exprs.append(("scalar", _Src(lhs, ln, col)))
                exprs.append(("scalar", _Src(rhs, ln, col + len(lhs) + 1)))
            else:
                src = _Src(body, ln, col)
                exprs.append(("scalar", src))
            doc.relations.append(src)
        elif section == "differentials":
            m = _DIFF.match(body)
            if not m:
                raise ParseError("expected 'd NAME = EXPR'", ln, col, ("d NAME = EXPR",))
            name, rhs = m.group(1), m.group(2)
            if name in doc.differentials:
                raise DuplicateDeclaration(f"d {name} declared twice", ln, col)
            doc.differentials[name] = _Src(rhs, ln, col + m.start(2))
            exprs.append(("form", doc.differentials[name]))
            exprs.append(("dname", _Src(name, ln, col + m.start(1))))
        else:
            m = _KEYVAL.match(body)
            if not m:
                raise ParseError("expected 'KEY = VALUE'", ln, col, ("KEY = VALUE",))
            key, val = m.group(1), m.group(2).strip()
            src = _Src(val, ln, col + m.start(2))
            if section == "pseudoflag":
                if key not in PSEUDOFLAG_KEYS:
                    raise ParseError(f"unknown pseudoflag key {key!r}", ln, col, PSEUDOFLAG_KEYS)
                if key in doc.pseudoflag.entries:
                    raise DuplicateDeclaration(f"pseudoflag key {key!r} repeated", ln, col)
                doc.pseudoflag.entries[key] = src
            elif section == "gauge":
                key = GAUGE_ALIASES.get(key, key)
                if key not in GAUGE_KEYS:
                    raise ParseError(f"unknown gauge parameter {m.group(1)!r}", ln, col,
                                     tuple(GAUGE_ALIASES) + GAUGE_KEYS)
                if key in doc.gauge:
                    raise DuplicateDeclaration(f"gauge parameter {key!r} repeated", ln, col)
                doc.gauge[key] = src
                exprs.append(("gauge", src))
            elif section == "conjugation":
                if key in doc.conjugation:
                    raise DuplicateDeclaration(f"conjugate of {key!r} repeated", ln, col)
                doc.conjugation[key] = src

    # name checks once every declaration is known
    declared = set(doc.symbols)
    basis = set(doc.basis)
    for kind, src in exprs:
        if kind == "dname":
            if src.text not in basis and src.text not in doc.fiber:
                what = seen_names.get(src.text)
                if what == "constant":
                    raise ParseError(f"{src.text!r} is constant; its differential is zero",
                                     src.line, src.col)
                raise UndeclaredName(f"d of undeclared name {src.text!r}", src.line, src.col)
            continue
        if kind == "gauge":
            # the group parameters alpha..epsilon may be used as free symbols
            for t in _tokenize(src.text, src.line, src.col):
                if t.kind == "name" and t.text in GAUGE_KEYS and t.text not in declared \
                        and t.text not in doc.gauge_symbols:
                    doc.gauge_symbols.append(t.text)
            _check_names(src, declared | set(GAUGE_KEYS))
            continue
        allowed = declared | basis if kind == "form" else declared
        _check_names(src, allowed)
    if doc.pseudoflag is not None:
        for key in ("contact", "Z1", "Z2", "scale", "fiber"):
            if key not in doc.pseudoflag.entries:
                raise ParseError(f"[pseudoflag] is missing the key {key!r}", None, None,
                                 PSEUDOFLAG_KEYS)
        pf = doc.pseudoflag.entries
        for key in ("contact", "Z1", "Z2"):
            _check_names(pf[key], declared | basis)
        if pf["fiber"].text not in basis:
            raise UndeclaredName(f"fiber form {pf['fiber'].text!r} is not a basis form",
                                 pf["fiber"].line, pf["fiber"].col)
        if pf["scale"].text not in doc.fiber:
            raise UndeclaredName(f"scale {pf['scale'].text!r} is not a fiber coordinate",
                                 pf["scale"].line, pf["scale"].col)
    return doc


def _check_names(src: _Src, allowed):
    for t in _tokenize(src.text, src.line, src.col):
        if t.kind == "name" and t.text != "i" and t.text not in allowed:
            raise UndeclaredName(f"undeclared name {t.text!r}", src.line, t.col)
