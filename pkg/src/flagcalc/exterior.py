"""Graded exterior algebra over a declared coframe.

A :class:`FrameSpace` fixes an ordered basis of 1-forms together with the
structural differentials of every basis form and every ``fiber`` coordinate.
``constant`` symbols have zero differential.  Forms store their coefficients
under bitmask multi-indices, so the basis is limited to 30 forms.

Typical use::

    frame = FrameSpace.build(
        ["alpha", "beta", "gamma"],
        {"alpha": "-beta ^ gamma", "beta": "-gamma ^ alpha", "gamma": "-alpha ^ beta"},
    )
    alpha, beta, gamma = frame.basis_forms()
    exterior_derivative(alpha).is_zero()   # False
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import (DegreeMismatch, FrameInconsistent, FrameMismatch,
                     InputError, NonInvertible, UnknownSymbol)
from .scalar import (NO_RELATIONS, ONE, ZERO, RelationSet, Scalar, as_scalar,
                     partial_derivative, substitute, symbol_id, symbol_name)

__all__ = [
    "FrameSpace", "Form", "ConsistencyReport", "Rebase",
    "wedge", "exterior_derivative", "check_frame_consistency", "coefficient",
    "pullback_section", "rebase", "solve_linear", "decompose",
]

MAX_BASIS = 30


def _bits(mask: int) -> List[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _wedge_sign(a: int, b: int) -> int:
    """Sign of the permutation sorting indices(a) + indices(b); a & b == 0."""
    n = 0
    while b:
        low = b & -b
        j = low.bit_length() - 1
        n += (a >> (j + 1)).bit_count()
        b ^= low
    return -1 if n & 1 else 1


def _split_names(names) -> List[str]:
    if names is None:
        return []
    if isinstance(names, str):
        return names.replace(",", " ").split()
    return list(names)


class FrameSpace:
    """An ordered coframe with structural differentials and relations.

    A frame is *open* until :func:`check_frame_consistency` has run; after
    that its differentials are frozen.  Exterior differentiation requires a
    frame that passed the check.
    """

    def __init__(self, basis: Sequence[str], constants=(), fiber=(),
                 relations: Optional[RelationSet] = None):
        basis = _split_names(basis)
        if len(basis) > MAX_BASIS:
            raise InputError(f"at most {MAX_BASIS} basis forms are supported")
        if len(set(basis)) != len(basis):
            raise InputError("basis form names must be distinct")
        self.basis: Tuple[str, ...] = tuple(basis)
        self.index: Dict[str, int] = {n: i for i, n in enumerate(self.basis)}
        self.constants = frozenset(symbol_id(n) for n in _split_names(constants))
        fiber_ids = [symbol_id(n) for n in _split_names(fiber)]
        clash = self.constants.intersection(fiber_ids)
        if clash:
            raise InputError("symbols declared both constant and fiber: "
                             + ", ".join(symbol_name(s) for s in sorted(clash)))
        self.fiber_ids: Tuple[int, ...] = tuple(fiber_ids)
        self.relations = relations if relations is not None else NO_RELATIONS
        self.d_rules: Dict[int, Form] = {}
        self.fiber_d: Dict[int, Form] = {}
        self.usable = False
        self.sealed = False
        self._dmono: Dict[int, Form] = {}

    # -- construction -----------------------------------------------------
    @classmethod
    def build(cls, basis, d: Mapping[str, object], constants=(), fiber=(),
              relations=(), check: bool = True) -> "FrameSpace":
        """Build a frame from DSL strings (or Forms) and run the d^2 check.

        ``relations`` may be a :class:`RelationSet` or an iterable of
        expressions, each declared equal to zero.
        """
        if not isinstance(relations, RelationSet):
            from .dsl import parse_scalar
            polys = [parse_scalar(r) if isinstance(r, str) else as_scalar(r)
                     for r in relations]
            relations = RelationSet.from_polynomials(polys)
        frame = cls(basis, constants, fiber, relations)
        frame.set_differentials(d)
        if check:
            report = check_frame_consistency(frame)
            if not report.usable:
                raise FrameInconsistent(report.summary())
        return frame

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def declared_symbols(self) -> frozenset:
        return self.constants | frozenset(self.fiber_ids)

    def basis_form(self, name: str) -> "Form":
        try:
            i = self.index[name]
        except KeyError:
            raise InputError(f"{name!r} is not a basis form of this frame") from None
        return Form(self, 1, {1 << i: ONE})

    def basis_forms(self) -> Tuple["Form", ...]:
        return tuple(self.basis_form(n) for n in self.basis)

    def zero(self, degree: int = 0) -> "Form":
        return Form(self, degree, {})

    def scalar_form(self, s) -> "Form":
        s = as_scalar(s)
        return Form(self, 0, {0: s} if s else {})

    def form(self, text: str) -> "Form":
        """Parse a DSL expression into a Form on this frame."""
        from .dsl import parse_expression
        return parse_expression(text, frame=self, as_form=True)

    def scalar(self, text: str) -> Scalar:
        from .dsl import parse_scalar
        return parse_scalar(text)

    def _coerce_rule(self, value, degree: int) -> "Form":
        if isinstance(value, str):
            value = self.form(value)
        elif not isinstance(value, Form):
            value = self.scalar_form(value)
        if value.frame is not self:
            raise FrameMismatch("differential lives on a different frame")
        if value.degree == 0 and not value.terms:
            value = self.zero(degree)
        if value.degree != degree:
            raise DegreeMismatch(f"expected a {degree}-form, got degree {value.degree}")
        return value

    def set_differentials(self, rules: Mapping[str, object]) -> None:
        if self.sealed:
            raise InputError("frame differentials are frozen after the consistency check")
        for name, value in rules.items():
            if name in self.index:
                i = self.index[name]
                if i in self.d_rules:
                    raise InputError(f"d {name} declared twice")
                self.d_rules[i] = self._coerce_rule(value, 2)
            else:
                sid = symbol_id(name, create=False) if name else None
                if sid is None or sid not in self.fiber_ids:
                    if sid is not None and sid in self.constants:
                        raise InputError(f"{name} is a constant; its differential is zero")
                    raise InputError(f"{name!r} is neither a basis form nor a fiber coordinate")
                if sid in self.fiber_d:
                    raise InputError(f"d {name} declared twice")
                self.fiber_d[sid] = self._coerce_rule(value, 1)

    def missing_differentials(self) -> List[str]:
        out = [n for i, n in enumerate(self.basis) if i not in self.d_rules]
        out += [symbol_name(s) for s in self.fiber_ids if s not in self.fiber_d]
        return out

    # -- exterior derivative internals ------------------------------------
    def _d_scalar(self, f: Scalar) -> "Form":
        syms = f.symbols()
        out: Dict[int, Scalar] = {}
        if not syms:
            return Form(self, 1, out)
        unknown = syms - self.constants - set(self.fiber_ids)
        if unknown:
            raise UnknownSymbol("symbols not declared on this frame: "
                                + ", ".join(sorted(symbol_name(s) for s in unknown)))
        for sid in self.fiber_ids:
            if sid not in syms:
                continue
            df = partial_derivative(f, sid)
            if not df:
                continue
            for m, c in self.fiber_d[sid].terms.items():
                v = out.get(m)
                out[m] = df * c if v is None else v + df * c
        return Form(self, 1, {m: c for m, c in out.items() if c})

    def _d_mono(self, mask: int) -> "Form":
        hit = self._dmono.get(mask)
        if hit is not None:
            return hit
        k = mask.bit_count()
        low = mask & -mask
        i = low.bit_length() - 1
        first = self.d_rules.get(i)
        if first is None:
            raise InputError(f"no differential declared for {self.basis[i]}")
        if k == 1:
            res = first
        else:
            rest = mask ^ low
            sigma = Form(self, 1, {low: ONE})
            rest_form = Form(self, k - 1, {rest: ONE})
            res = wedge(first, rest_form) - wedge(sigma, self._d_mono(rest))
        if self.sealed:
            self._dmono[mask] = res
        return res

    def _d(self, a: "Form") -> "Form":
        out: Dict[int, Scalar] = {}
        deg = a.degree + 1
        for mask, f in a.terms.items():
            if f.symbols():
                df = self._d_scalar(f)
                if df.terms:
                    _accumulate(out, wedge(df, Form(self, a.degree, {mask: ONE})).terms)
            if mask:
                dm = self._d_mono(mask)
                for m, c in dm.terms.items():
                    v = out.get(m)
                    out[m] = f * c if v is None else v + f * c
        return Form(self, deg, {m: c for m, c in out.items() if c})

    # -- derived frames ---------------------------------------------------
    def extended(self, basis=(), d: Optional[Mapping[str, object]] = None,
                 constants=(), fiber=(), relations=()) -> "FrameSpace":
        """A new frame with extra basis forms/coordinates appended.  Forms on
        this frame move over with :meth:`Form.lift` (indices are preserved)."""
        extra_rel = relations
        if not isinstance(extra_rel, RelationSet):
            from .dsl import parse_scalar
            extra_rel = RelationSet.from_polynomials(
                [parse_scalar(r) if isinstance(r, str) else as_scalar(r) for r in relations])
        new = FrameSpace(
            list(self.basis) + _split_names(basis),
            [symbol_name(s) for s in sorted(self.constants)] + _split_names(constants),
            [symbol_name(s) for s in self.fiber_ids] + _split_names(fiber),
            self.relations.merged(extra_rel) if extra_rel else self.relations,
        )
        rules = {self.basis[i]: f.lift(new) for i, f in self.d_rules.items()}
        rules.update({symbol_name(s): f.lift(new) for s, f in self.fiber_d.items()})
        new.set_differentials(rules)
        if d:
            new.set_differentials(d)
        report = check_frame_consistency(new)
        if not report.usable:
            raise FrameInconsistent(report.summary())
        return new

    def __repr__(self):
        return f"FrameSpace({', '.join(self.basis)})"


def _accumulate(out: Dict[int, Scalar], terms: Mapping[int, Scalar], sign: int = 1) -> None:
    for m, c in terms.items():
        v = out.get(m)
        if sign < 0:
            c = -c
        out[m] = c if v is None else v + c


class Form:
    """Homogeneous differential form on a :class:`FrameSpace`."""

    __slots__ = ("frame", "degree", "terms")

    def __init__(self, frame: FrameSpace, degree: int, terms: Dict[int, Scalar]):
        self.frame = frame
        self.degree = degree
        self.terms = terms

    # -- algebra ----------------------------------------------------------
    def _same(self, o: "Form") -> None:
        if o.frame is not self.frame:
            raise FrameMismatch("forms live on different frames")

    def _coerce(self, o):
        if isinstance(o, Form):
            self._same(o)
            return o
        s = as_scalar(o)
        return Form(self.frame, 0, {0: s} if s else {})

    def __add__(self, o):
        o = self._coerce(o)
        if not o.terms:
            return self
        if not self.terms:
            return o if o.degree == self.degree or self.degree == 0 else _retag(o, self.degree)
        if o.degree != self.degree:
            raise DegreeMismatch(f"cannot add a {self.degree}-form and a {o.degree}-form")
        out = dict(self.terms)
        _accumulate(out, o.terms)
        return Form(self.frame, self.degree, {m: c for m, c in out.items() if c})

    __radd__ = __add__

    def __neg__(self):
        return Form(self.frame, self.degree, {m: -c for m, c in self.terms.items()})

    def __sub__(self, o):
        o = self._coerce(o)
        return self + (-o)

    def __rsub__(self, o):
        return self._coerce(o) + (-self)

    def __mul__(self, o):
        if isinstance(o, Form):
            self._same(o)
            if o.degree == 0 or self.degree == 0:
                return wedge(self, o)
            raise TypeError("use wedge() to multiply forms of positive degree")
        s = as_scalar(o)
        if not s:
            return Form(self.frame, self.degree, {})
        return Form(self.frame, self.degree,
                    {m: c * s for m, c in self.terms.items() if c * s})

    __rmul__ = __mul__

    def __truediv__(self, o):
        return self * as_scalar(o).inverse()

    def wedge(self, *others: "Form") -> "Form":
        out = self
        for o in others:
            out = wedge(out, o)
        return out

    def d(self) -> "Form":
        return exterior_derivative(self)

    # -- inspection -------------------------------------------------------
    def is_zero(self, relations: Optional[RelationSet] = None) -> bool:
        rel = self.frame.relations if relations is None else relations
        if not rel.rules:
            return not self.terms
        return all(rel.is_zero(c) for c in self.terms.values())

    def reduced(self, relations: Optional[RelationSet] = None) -> "Form":
        rel = self.frame.relations if relations is None else relations
        if not rel.rules:
            return self
        out = {}
        for m, c in self.terms.items():
            c = rel.reduce_scalar(c)
            if c:
                out[m] = c
        return Form(self.frame, self.degree, out)

    def equals(self, o: "Form", relations: Optional[RelationSet] = None) -> bool:
        return (self - o).is_zero(relations)

    def names(self, mask: int) -> Tuple[str, ...]:
        return tuple(self.frame.basis[i] for i in _bits(mask))

    def items(self):
        """(basis-name tuple, coefficient) pairs in basis order."""
        for m in sorted(self.terms, key=lambda k: _bits(k)):
            yield self.names(m), self.terms[m]

    def support(self) -> List[Tuple[str, ...]]:
        return [n for n, _ in self.items()]

    def scalar(self) -> Scalar:
        if self.degree != 0:
            raise DegreeMismatch("not a 0-form")
        return self.terms.get(0, ZERO)

    def lift(self, frame: FrameSpace) -> "Form":
        """Move this form to ``frame`` by matching basis names."""
        if frame is self.frame:
            return self
        mapping = {}
        for i, n in enumerate(self.frame.basis):
            if n not in frame.index:
                if any(m >> i & 1 for m in self.terms):
                    raise FrameMismatch(f"basis form {n} missing from target frame")
                continue
            mapping[i] = frame.index[n]
        out: Dict[int, Scalar] = {}
        for m, c in self.terms.items():
            idx = [mapping[i] for i in _bits(m)]
            nm = 0
            for j in idx:
                nm |= 1 << j
            sign = _perm_sign(idx)
            out[nm] = c if sign > 0 else -c
        return Form(frame, self.degree, out)

    def map_coefficients(self, fn) -> "Form":
        out = {}
        for m, c in self.terms.items():
            c = fn(c)
            if c:
                out[m] = c
        return Form(self.frame, self.degree, out)

    def __str__(self):
        if not self.terms:
            return "0"
        out = ""
        for names, c in self.items():
            wedge_str = "^".join(names)
            cs = str(c)
            if not names:
                t = cs if len(c.num.terms) == 1 or not c.den.is_one() else cs
                if " " in cs:
                    t = f"({cs})"
            elif c == ONE:
                t = wedge_str
            elif c == -ONE:
                t = "-" + wedge_str
            elif " " in cs:
                t = f"({cs})*{wedge_str}"
            else:
                t = f"{cs}*{wedge_str}"
            if not out:
                out = t
            elif t.startswith("-"):
                out += " - " + t[1:]
            else:
                out += " + " + t
        return out

    def __repr__(self):
        return f"Form[{self.degree}]({self})"

    __hash__ = None


def _retag(f: Form, degree: int) -> Form:
    return Form(f.frame, degree, f.terms)


def _perm_sign(seq: Sequence[int]) -> int:
    n = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                n += 1
    return -1 if n & 1 else 1


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def wedge(a: Form, b: Form) -> Form:
    """Exterior product; the result degree is deg a + deg b."""
    if a.frame is not b.frame:
        raise FrameMismatch("wedge of forms on different frames")
    deg = a.degree + b.degree
    out: Dict[int, Scalar] = {}
    if deg > a.frame.dim:
        return Form(a.frame, deg, out)
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            if ma & mb:
                continue
            c = ca * cb
            if _wedge_sign(ma, mb) < 0:
                c = -c
            m = ma | mb
            v = out.get(m)
            out[m] = c if v is None else v + c
    return Form(a.frame, deg, {m: c for m, c in out.items() if c})


def exterior_derivative(a: Form) -> Form:
    """d a, using the frame's structural rules and coordinate differentials."""
    if not a.frame.usable:
        raise FrameInconsistent("frame has not passed check_frame_consistency")
    return a.frame._d(a)


@dataclass
class ConsistencyReport:
    """Residuals of d(d s) for every basis form and fiber coordinate s."""

    residuals: Dict[str, Form]
    missing: List[str] = field(default_factory=list)

    @property
    def usable(self) -> bool:
        return not self.missing and all(r.is_zero() for r in self.residuals.values())

    def failures(self) -> Dict[str, Form]:
        return {k: r for k, r in self.residuals.items() if not r.is_zero()}

    def summary(self) -> str:
        if self.missing:
            return "missing differentials: " + ", ".join(self.missing)
        bad = self.failures()
        if not bad:
            return "d^2 = 0 on every basis form and coordinate"
        return "; ".join(f"d(d {k}) = {v}" for k, v in bad.items())


def check_frame_consistency(frame: FrameSpace) -> ConsistencyReport:
    """Apply d twice to every basis form and fiber coordinate.

    The frame is sealed and marked usable exactly when every residual
    vanishes modulo the frame's relations.
    """
    missing = frame.missing_differentials()
    if missing:
        return ConsistencyReport({}, missing)
    frame.sealed = True
    residuals = {}
    for i, name in enumerate(frame.basis):
        residuals[name] = frame._d(frame.d_rules[i])
    for sid in frame.fiber_ids:
        residuals[symbol_name(sid)] = frame._d(frame.fiber_d[sid])
    report = ConsistencyReport(residuals)
    frame.usable = report.usable
    if not frame.usable:
        frame._dmono.clear()
    return report


def _mask_of(frame: FrameSpace, names: Sequence[str]) -> Tuple[int, int]:
    idx = []
    for n in names:
        if n not in frame.index:
            raise InputError(f"{n!r} is not a basis form of this frame")
        idx.append(frame.index[n])
    if len(set(idx)) != len(idx):
        return 0, 0
    mask = 0
    for i in idx:
        mask |= 1 << i
    return mask, _perm_sign(idx)


def coefficient(a: Form, idx: Sequence[str]) -> Scalar:
    """Coefficient of the wedge of the named basis forms, in the given order."""
    if isinstance(idx, str):
        idx = _split_names(idx.replace("^", " "))
    idx = list(idx)
    if len(idx) != a.degree:
        raise DegreeMismatch(f"index of length {len(idx)} for a {a.degree}-form")
    mask, sign = _mask_of(a.frame, idx)
    if sign == 0:
        return ZERO
    c = a.terms.get(mask, ZERO)
    return c if sign > 0 else -c


def pullback_section(a: Form, killed: Iterable[str] = (), fixed: Optional[Mapping] = None) -> Form:
    """Drop every term containing a killed basis form, then substitute
    coordinate values.  The result stays on the same frame."""
    kill = 0
    for n in _split_names(killed) if isinstance(killed, str) else killed:
        if n not in a.frame.index:
            raise InputError(f"{n!r} is not a basis form of this frame")
        kill |= 1 << a.frame.index[n]
    out = {}
    for m, c in a.terms.items():
        if m & kill:
            continue
        if fixed:
            c = substitute(c, fixed, a.frame.relations)
        if c:
            out[m] = c
    return Form(a.frame, a.degree, out)


# ---------------------------------------------------------------------------
# Change of coframe
# ---------------------------------------------------------------------------

def _pivot_cost(v: Scalar):
    # without gcds, dividing by a composite entry leaves a denominator that
    # later cancellations cannot remove, so prefer constants, then monomials
    return (not v.is_constant(), len(v.num.terms) + len(v.den.terms))


def _pick_pivot(rows, col, candidates):
    best = None
    for r in candidates:
        v = rows[r][col]
        if v and (best is None or _pivot_cost(v) < _pivot_cost(rows[best][col])):
            best = r
    return best


def solve_linear(matrix: List[List[Scalar]], relations: RelationSet = NO_RELATIONS
                 ) -> List[List[Scalar]]:
    """Inverse of a square Scalar matrix by Gauss-Jordan elimination."""
    n = len(matrix)
    a = [[as_scalar(v) for v in row] + [ONE if i == j else ZERO for j in range(n)]
         for i, row in enumerate(matrix)]
    for col in range(n):
        for r in range(col, n):
            a[r][col] = relations.reduce_scalar(a[r][col]) if relations.rules else a[r][col]
        piv = _pick_pivot(a, col, range(col, n))
        if piv is None:
            raise NonInvertible("singular change of coframe")
        a[col], a[piv] = a[piv], a[col]
        inv = relations.reduce_scalar(a[col][col]).inverse()
        a[col] = [relations.reduce_scalar(v * inv) for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [relations.reduce_scalar(v - f * w) for v, w in zip(a[r], a[col])]
    return [row[n:] for row in a]


class Rebase:
    """Transport of forms between an old frame and a rebased frame."""

    def __init__(self, old: FrameSpace, new: FrameSpace, forward, backward):
        self.old = old
        self.new = new
        self._fwd = forward    # old basis i -> 1-form on new frame
        self._bwd = backward   # new basis j -> 1-form on old frame
        self._cache: Dict[int, Form] = {}

    def _image(self, mask: int, images, target: FrameSpace, cache) -> Form:
        hit = cache.get(mask) if cache is not None else None
        if hit is not None:
            return hit
        out = Form(target, 0, {0: ONE})
        for i in _bits(mask):
            out = wedge(out, images[i])
        if cache is not None:
            cache[mask] = out
        return out

    def to_new(self, a: Form) -> Form:
        if a.frame is not self.old:
            raise FrameMismatch("form is not on the source frame")
        out: Dict[int, Scalar] = {}
        for m, c in a.terms.items():
            img = self._image(m, self._fwd, self.new, self._cache)
            for k, v in img.terms.items():
                w = out.get(k)
                out[k] = c * v if w is None else w + c * v
        return Form(self.new, a.degree, {k: v for k, v in out.items() if v})

    def to_old(self, a: Form) -> Form:
        if a.frame is not self.new:
            raise FrameMismatch("form is not on the rebased frame")
        out: Dict[int, Scalar] = {}
        for m, c in a.terms.items():
            img = self._image(m, self._bwd, self.old, None)
            for k, v in img.terms.items():
                w = out.get(k)
                out[k] = c * v if w is None else w + c * v
        return Form(self.old, a.degree, {k: v for k, v in out.items() if v})


def rebase(frame: FrameSpace, new_basis: Sequence[Tuple[str, Form]],
           constants=None, fiber=None) -> Rebase:
    """Re-express ``frame`` in a new coframe given as 1-forms on the old one.

    Returns a :class:`Rebase` whose ``new`` frame carries the transported
    structural differentials and coordinate differentials.
    """
    if len(new_basis) != frame.dim:
        raise InputError("a change of coframe must keep the dimension")
    names = [n for n, _ in new_basis]
    rel = frame.relations
    rows = []
    for _, f in new_basis:
        if f.frame is not frame or f.degree != 1:
            raise FrameMismatch("new basis forms must be 1-forms on the old frame")
        rows.append([f.terms.get(1 << i, ZERO) for i in range(frame.dim)])
    inv = solve_linear(rows, rel)
    new = FrameSpace(
        names,
        [symbol_name(s) for s in sorted(frame.constants)] if constants is None else constants,
        [symbol_name(s) for s in frame.fiber_ids] if fiber is None else fiber,
        rel,
    )
    # old e_i = sum_j inv[i][j] f_j ; (f = A e, e = A^{-1} f); rows of A^{-1}
    forward = [Form(new, 1, {1 << j: inv[i][j] for j in range(frame.dim) if inv[i][j]})
               for i in range(frame.dim)]
    backward = [f for _, f in new_basis]
    rb = Rebase(frame, new, forward, backward)
    rules = {}
    for j, (n, f) in enumerate(new_basis):
        rules[n] = rb.to_new(frame._d(f)).reduced()
    for sid in new.fiber_ids:
        rules[symbol_name(sid)] = rb.to_new(frame.fiber_d[sid]).reduced()
    new.set_differentials(rules)
    report = check_frame_consistency(new)
    if not report.usable:
        raise FrameInconsistent("rebased frame failed d^2 = 0: " + report.summary())
    return rb


def decompose(target: Form, generators: Sequence[Form],
              relations: Optional[RelationSet] = None) -> Tuple[List[Scalar], Form]:
    """Write ``target`` as a Scalar combination of ``generators``.

    Returns the coefficients and the residual target - sum(c_k g_k); the
    residual is zero exactly when target lies in the span.  Dependent
    generators get coefficient zero.
    """
    rel = target.frame.relations if relations is None else relations
    for g in generators:
        if g.frame is not target.frame:
            raise FrameMismatch("generators live on a different frame")
        if g.degree != target.degree:
            raise DegreeMismatch("generators and target differ in degree")
    k = len(generators)
    masks = set(target.terms)
    for g in generators:
        masks.update(g.terms)
    order = sorted(masks, key=_bits)
    rows = [[g.terms.get(m, ZERO) for g in generators] + [target.terms.get(m, ZERO)]
            for m in order]

    def nz(v):
        return rel.reduce_scalar(v) if rel.rules else v

    pivots = []
    r = 0
    for col in range(k):
        for i in range(r, len(rows)):
            rows[i][col] = nz(rows[i][col])
        piv = _pick_pivot(rows, col, range(r, len(rows)))
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][col].inverse()
        rows[r] = [nz(v * inv) for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [nz(v - f * w) for v, w in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    coeffs = [ZERO] * k
    for i, col in enumerate(pivots):
        coeffs[col] = rows[i][k]
    residual = target
    for c, g in zip(coeffs, generators):
        if c:
            residual = residual - g * c
    return coeffs, residual.reduced(rel)
