"""Exact scalar arithmetic over the Gaussian rationals Q(i).

Coefficients are :class:`GaussianRational` numbers, polynomials are sparse
maps from monomials to coefficients, and a :class:`Scalar` is a quotient of
two polynomials.  Scalars are never brought to a canonical GCD-reduced form;
two Scalars are equal when the numerator of their difference vanishes, after
optional reduction modulo a :class:`RelationSet`.

Symbols live in a single process-wide, append-only table.  The position of a
symbol in that table fixes the graded-lexicographic monomial order: symbols
registered earlier rank higher.

Example
-------
>>> x, y, z = symbols("x y z")
>>> rel = RelationSet.from_polynomials([x**2 + y*z + 1])
>>> is_zero(x**2 + y*z + 1, rel)
True
"""

from __future__ import annotations

import threading
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Mapping, Optional, Tuple

from gmpy2 import mpq

from .errors import (DivisionByZero, InvalidRelation, NonTerminatingReduction,
                     UnknownSymbol)

__all__ = [
    "GaussianRational", "Polynomial", "Scalar", "RelationSet",
    "symbol", "symbols", "symbol_id", "symbol_name", "as_scalar",
    "arith", "partial_derivative", "is_zero", "substitute",
    "ZERO", "ONE", "I", "REDUCTION_BUDGET",
]

REDUCTION_BUDGET = 10 ** 6

_MPQ_ZERO = mpq(0)
_MPQ_ONE = mpq(1)


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

def _to_mpq(v):
    if isinstance(v, type(_MPQ_ZERO)):
        return v
    if isinstance(v, bool):
        return mpq(int(v))
    if isinstance(v, int):
        return mpq(v)
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    if isinstance(v, str):
        return mpq(v)
    if isinstance(v, Rational):
        return mpq(int(v.numerator), int(v.denominator))
    raise TypeError(f"cannot convert {type(v).__name__} to an exact rational")


class GaussianRational:
    """An element re + im*i of Q(i), held as two gmpy2 rationals."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _to_mpq(re)
        self.im = _to_mpq(im)

    @staticmethod
    def _raw(re, im):
        g = object.__new__(GaussianRational)
        g.re = re
        g.im = im
        return g

    def __add__(self, o):
        return GaussianRational._raw(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return GaussianRational._raw(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        if not self.im and not o.im:
            return GaussianRational._raw(self.re * o.re, _MPQ_ZERO)
        return GaussianRational._raw(self.re * o.re - self.im * o.im,
                                     self.re * o.im + self.im * o.re)

    def __truediv__(self, o):
        if not o:
            raise DivisionByZero("division by the zero coefficient")
        if not o.im:
            return GaussianRational._raw(self.re / o.re, self.im / o.re)
        n = o.re * o.re + o.im * o.im
        return GaussianRational._raw((self.re * o.re + self.im * o.im) / n,
                                     (self.im * o.re - self.re * o.im) / n)

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def conjugate(self):
        return GaussianRational._raw(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        if isinstance(o, GaussianRational):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, Fraction)):
            return not self.im and self.re == _to_mpq(o)
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def is_one(self):
        return self.re == 1 and not self.im

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return _imag_str(self.im)
        tail = _imag_str(self.im)
        if not tail.startswith("-"):
            tail = "+" + tail
        return f"{self.re}{tail}"


def _imag_str(v):
    if v == 1:
        return "i"
    if v == -1:
        return "-i"
    return f"{v}*i"


C_ZERO = GaussianRational._raw(_MPQ_ZERO, _MPQ_ZERO)
C_ONE = GaussianRational._raw(_MPQ_ONE, _MPQ_ZERO)
C_I = GaussianRational._raw(_MPQ_ZERO, _MPQ_ONE)


def _as_coeff(v) -> GaussianRational:
    if isinstance(v, GaussianRational):
        return v
    return GaussianRational._raw(_to_mpq(v), _MPQ_ZERO)


# ---------------------------------------------------------------------------
# Symbol table
# ---------------------------------------------------------------------------

_symbol_lock = threading.Lock()
_symbol_names: list = []
_symbol_ids: Dict[str, int] = {}


def symbol_id(name: str, create: bool = True) -> int:
    """Return the table index of ``name``, registering it if allowed."""
    sid = _symbol_ids.get(name)
    if sid is not None:
        return sid
    if not create:
        raise UnknownSymbol(f"undeclared symbol {name!r}")
    with _symbol_lock:
        sid = _symbol_ids.get(name)
        if sid is None:
            sid = len(_symbol_names)
            _symbol_names.append(name)
            _symbol_ids[name] = sid
    return sid


def symbol_name(sid: int) -> str:
    return _symbol_names[sid]


# ---------------------------------------------------------------------------
# Monomials: sorted tuples of (symbol id, exponent) pairs
# ---------------------------------------------------------------------------

Monomial = Tuple[Tuple[int, int], ...]


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        sa, ea = a[i]
        sb, eb = b[j]
        if sa == sb:
            out.append((sa, ea + eb))
            i += 1
            j += 1
        elif sa < sb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_div(a: Monomial, b: Monomial) -> Optional[Monomial]:
    """a / b when b divides a, else None."""
    if not b:
        return a
    da = dict(a)
    for s, e in b:
        have = da.get(s, 0)
        if have < e:
            return None
        if have == e:
            del da[s]
        else:
            da[s] = have - e
    return tuple(sorted(da.items()))


def mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    db = dict(b)
    return tuple((s, min(e, db[s])) for s, e in a if s in db)


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    d = dict(a)
    for s, e in b:
        if d.get(s, 0) < e:
            d[s] = e
    return tuple(sorted(d.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_key(m: Monomial):
    """Sort key realising graded lexicographic order (larger key = larger)."""
    return (mono_degree(m), tuple((-s, e) for s, e in m))


def mono_str(m: Monomial) -> str:
    parts = []
    for s, e in m:
        name = symbol_name(s)
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

class Polynomial:
    """Sparse polynomial over Q(i).  ``terms`` never stores zero coefficients."""

    __slots__ = ("terms", "_syms")

    def __init__(self, terms: Optional[Dict[Monomial, GaussianRational]] = None):
        self.terms = terms if terms is not None else {}
        self._syms = None

    @staticmethod
    def constant(c) -> "Polynomial":
        c = _as_coeff(c)
        return Polynomial({(): c} if c else {})

    @staticmethod
    def variable(sid: int) -> "Polynomial":
        return Polynomial({((sid, 1),): C_ONE})

    def symbols(self) -> frozenset:
        if self._syms is None:
            self._syms = frozenset(s for m in self.terms for s, _ in m)
        return self._syms

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get(()) == C_ONE

    def constant_value(self) -> GaussianRational:
        return self.terms.get((), C_ZERO)

    def is_term(self) -> bool:
        return len(self.terms) == 1

    def leading(self):
        m = max(self.terms, key=mono_key)
        return m, self.terms[m]

    def __eq__(self, o):
        if not isinstance(o, Polynomial):
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, o: "Polynomial") -> "Polynomial":
        if len(o.terms) > len(self.terms):
            big, small = o.terms, self.terms
        else:
            big, small = self.terms, o.terms
        out = dict(big)
        for m, c in small.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, o: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for m, c in o.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = -c
            else:
                v = v - c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Polynomial(out)

    def __mul__(self, o: "Polynomial") -> "Polynomial":
        a, b = self.terms, o.terms
        if not a or not b:
            return Polynomial()
        if len(b) == 1:
            (mb, cb), = b.items()
            return self.mul_term(mb, cb)
        if len(a) == 1:
            (ma, ca), = a.items()
            return o.mul_term(ma, ca)
        out: Dict[Monomial, GaussianRational] = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = mono_mul(ma, mb)
                c = ca * cb
                v = out.get(m)
                out[m] = c if v is None else v + c
        return Polynomial({m: c for m, c in out.items() if c})

    def mul_term(self, m: Monomial, c: GaussianRational) -> "Polynomial":
        if not c:
            return Polynomial()
        if not m:
            if c.is_one():
                return self
            return Polynomial({k: v * c for k, v in self.terms.items()})
        return Polynomial({mono_mul(k, m): v * c for k, v in self.terms.items()})

    def scale(self, c) -> "Polynomial":
        return self.mul_term((), _as_coeff(c))

    def div_monomial(self, m: Monomial) -> "Polynomial":
        return Polynomial({mono_div(k, m): v for k, v in self.terms.items()})

    def monomial_content(self) -> Monomial:
        it = iter(self.terms)
        g = next(it)
        for m in it:
            if not g:
                break
            g = mono_gcd(g, m)
        return g

    def exact_div(self, d: "Polynomial") -> Optional["Polynomial"]:
        """Quotient self / d if d divides self exactly, else None."""
        if not d.terms:
            raise DivisionByZero("polynomial division by zero")
        lm, lc = d.leading()
        rem = dict(self.terms)
        quot: Dict[Monomial, GaussianRational] = {}
        while rem:
            m = max(rem, key=mono_key)
            q = mono_div(m, lm)
            if q is None:
                return None
            c = rem[m] / lc
            quot[q] = quot.get(q, C_ZERO) + c
            for dm, dc in d.terms.items():
                k = mono_mul(q, dm)
                v = rem.get(k, C_ZERO) - c * dc
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
        return Polynomial({m: c for m, c in quot.items() if c})

    def diff(self, sid: int) -> "Polynomial":
        if sid not in self.symbols():
            return Polynomial()
        out: Dict[Monomial, GaussianRational] = {}
        for m, c in self.terms.items():
            for k, (s, e) in enumerate(m):
                if s == sid:
                    if e == 1:
                        nm = m[:k] + m[k + 1:]
                    else:
                        nm = m[:k] + ((s, e - 1),) + m[k + 1:]
                    out[nm] = out.get(nm, C_ZERO) + c * _as_coeff(e)
                    break
        return Polynomial({m: c for m, c in out.items() if c})

    def conjugate_coefficients(self) -> "Polynomial":
        return Polynomial({m: c.conjugate() for m, c in self.terms.items()})

    def has_imaginary(self) -> bool:
        return any(c.im for c in self.terms.values())

    def subst(self, bindings: Mapping[int, "Scalar"]) -> "Scalar":
        if not bindings or not (self.symbols() & bindings.keys()):
            return Scalar._trusted(self, _P_ONE)
        powers: Dict[Tuple[int, int], Scalar] = {}
        keep: Dict[Monomial, GaussianRational] = {}
        total = ZERO
        for m, c in self.terms.items():
            bound = [(s, e) for s, e in m if s in bindings]
            if not bound:
                keep[m] = c
                continue
            rest = tuple((s, e) for s, e in m if s not in bindings)
            t = Scalar._trusted(Polynomial({rest: c}), _P_ONE)
            for s, e in bound:
                p = powers.get((s, e))
                if p is None:
                    p = bindings[s] ** e
                    powers[(s, e)] = p
                t = t * p
            total = total + t
        if keep:
            total = total + Scalar._trusted(Polynomial(keep), _P_ONE)
        return total

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: mono_key(kv[0]),
                      reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        out = ""
        for m, c in self.sorted_terms():
            t = _term_str(m, c)
            if not out:
                out = t
            elif t.startswith("-"):
                out += " - " + t[1:]
            else:
                out += " + " + t
        return out

    def __repr__(self):
        return f"Polynomial({self})"


def _term_str(m: Monomial, c: GaussianRational) -> str:
    if not m:
        if c.re and c.im:
            return f"({c})"
        return str(c)
    ms = mono_str(m)
    if c.is_one():
        return ms
    if c == GaussianRational._raw(-_MPQ_ONE, _MPQ_ZERO):
        return "-" + ms
    if c.re and c.im:
        return f"({c})*{ms}"
    return f"{c}*{ms}"


_P_ONE = Polynomial({(): C_ONE})
_P_ZERO = Polynomial()


# ---------------------------------------------------------------------------
# Scalars: rational functions
# ---------------------------------------------------------------------------

def _normalize(num: Polynomial, den: Polynomial):
    if not num.terms:
        return _P_ZERO, _P_ONE
    if not den.terms:
        raise DivisionByZero("zero denominator")
    if len(den.terms) == 1:
        (m, c), = den.terms.items()
        if not c.is_one():
            num = num.mul_term((), C_ONE / c)
        if not m:
            return num, _P_ONE
        g = mono_gcd(m, num.monomial_content())
        if g:
            num = num.div_monomial(g)
            m = mono_div(m, g)
            if not m:
                return num, _P_ONE
        return num, Polynomial({m: C_ONE})
    lm, lc = den.leading()
    if not lc.is_one():
        inv = C_ONE / lc
        num = num.mul_term((), inv)
        den = den.mul_term((), inv)
    g = mono_gcd(num.monomial_content(), den.monomial_content())
    if g:
        num = num.div_monomial(g)
        den = den.div_monomial(g)
    q = num.exact_div(den)
    if q is not None:
        return q, _P_ONE
    return num, den


class Scalar:
    """Rational function num/den over Q(i) in global symbols.

    Arithmetic is exact.  ``==`` tests equality as rational functions (no
    relations); use :func:`is_zero` with a :class:`RelationSet` for equality in
    a quotient ring.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Optional[Polynomial] = None):
        self.num, self.den = _normalize(num, den if den is not None else _P_ONE)

    @staticmethod
    def _trusted(num: Polynomial, den: Polynomial) -> "Scalar":
        s = object.__new__(Scalar)
        s.num = num
        s.den = den
        return s

    @staticmethod
    def _from(num: Polynomial, den: Polynomial) -> "Scalar":
        n, d = _normalize(num, den)
        return Scalar._trusted(n, d)

    # -- predicates -------------------------------------------------------
    def is_structural_zero(self) -> bool:
        return not self.num.terms

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.den.is_one() and self.num.is_constant()

    def constant_value(self) -> GaussianRational:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.constant_value()

    def symbols(self) -> frozenset:
        return self.num.symbols() | self.den.symbols()

    def symbol_names(self):
        return sorted(symbol_name(s) for s in self.symbols())

    def __bool__(self):
        return bool(self.num.terms)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return NotImplemented
        if not o.num.terms:
            return self
        if not self.num.terms:
            return o
        if self.den == o.den:
            if self.den.is_one():
                n = self.num + o.num
                return Scalar._trusted(n, _P_ONE) if n.terms else ZERO
            return Scalar._from(self.num + o.num, self.den)
        if self.den.is_term() and o.den.is_term():
            ma = next(iter(self.den.terms))
            mb = next(iter(o.den.terms))
            lcm = mono_lcm(ma, mb)
            n = (self.num.mul_term(mono_div(lcm, ma), C_ONE)
                 + o.num.mul_term(mono_div(lcm, mb), C_ONE))
            return Scalar._from(n, Polynomial({lcm: C_ONE}))
        return Scalar._from(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._trusted(-self.num, self.den)

    def __sub__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return NotImplemented
        if not self.num.terms or not o.num.terms:
            return ZERO
        if self.den.is_one() and o.den.is_one():
            return Scalar._trusted(self.num * o.num, _P_ONE)
        return Scalar._from(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self.num.terms:
            raise DivisionByZero("inverse of zero")
        return Scalar._from(self.den, self.num)

    def __truediv__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, o):
        o = _coerce(o)
        if o is NotImplemented:
            return NotImplemented
        if self.den == o.den:
            return self.num == o.num
        return not (self.num * o.den - o.num * self.den).terms

    __hash__ = None

    def conjugate_coefficients(self) -> "Scalar":
        return Scalar._trusted(self.num.conjugate_coefficients(),
                               self.den.conjugate_coefficients())

    def has_imaginary(self) -> bool:
        return self.num.has_imaginary() or self.den.has_imaginary()

    # -- printing ---------------------------------------------------------
    def __str__(self):
        ns = str(self.num)
        if self.den.is_one():
            return ns
        if len(self.num.terms) > 1:
            ns = f"({ns})"
        ds = str(self.den)
        dm = next(iter(self.den.terms)) if self.den.is_term() else None
        simple = dm is not None and len(dm) == 1 and self.den.terms[dm].is_one()
        if not simple:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"Scalar({self})"


def _coerce(v):
    if isinstance(v, Scalar):
        return v
    if isinstance(v, (int, Fraction, GaussianRational, type(_MPQ_ZERO))):
        return Scalar._trusted(Polynomial.constant(v), _P_ONE)
    return NotImplemented


def as_scalar(v) -> Scalar:
    """Coerce ints, Fractions, GaussianRationals and Scalars to a Scalar."""
    s = _coerce(v)
    if s is NotImplemented:
        raise TypeError(f"cannot use {type(v).__name__} as an exact scalar")
    return s


ZERO = Scalar._trusted(_P_ZERO, _P_ONE)
ONE = Scalar._trusted(_P_ONE, _P_ONE)
I = Scalar._trusted(Polynomial({(): C_I}), _P_ONE)


def symbol(name: str) -> Scalar:
    return Scalar._trusted(Polynomial.variable(symbol_id(name)), _P_ONE)


def symbols(names: str):
    """``symbols("x y z")`` -> tuple of symbol Scalars (comma or space separated)."""
    parts = names.replace(",", " ").split()
    return tuple(symbol(p) for p in parts)


# ---------------------------------------------------------------------------
# Relations
# ---------------------------------------------------------------------------

class RelationSet:
    """Rewrite rules ``lead -> replacement`` with every replacement monomial
    strictly below its lead in graded-lex order."""

    __slots__ = ("rules", "source")

    def __init__(self, rules: Iterable[Tuple[Monomial, Polynomial]] = (), source=()):
        rules = tuple(rules)
        for lead, rep in rules:
            if not lead:
                raise InvalidRelation("a relation cannot rewrite the constant monomial")
            lk = mono_key(lead)
            for m in rep.terms:
                if not mono_key(m) < lk:
                    raise InvalidRelation(
                        f"rule {mono_str(lead)} -> {rep} does not decrease in graded-lex order")
        self.rules = rules
        self.source = tuple(source)

    @classmethod
    def from_polynomials(cls, polys: Iterable) -> "RelationSet":
        """Each input p (a Scalar or Polynomial) declares p = 0.  The graded-lex
        leading monomial of the numerator becomes the rule's left side."""
        rules = []
        source = []
        for p in polys:
            if isinstance(p, Scalar):
                p = p.num
            if not p.terms:
                continue
            lead, lc = p.leading()
            if not lead:
                raise InvalidRelation(f"relation {p} = 0 is inconsistent")
            inv = -(C_ONE / lc)
            rep = Polynomial({m: c * inv for m, c in p.terms.items() if m != lead})
            rules.append((lead, rep))
            source.append(p)
        return cls(rules, source)

    def __bool__(self):
        return bool(self.rules)

    def __len__(self):
        return len(self.rules)

    def merged(self, other: "RelationSet") -> "RelationSet":
        return RelationSet(self.rules + other.rules, self.source + other.source)

    def reduce(self, p: Polynomial, budget: int = REDUCTION_BUDGET) -> Polynomial:
        if not self.rules or not p.terms:
            return p
        work = dict(p.terms)
        done: Dict[Monomial, GaussianRational] = {}
        used = 0
        rules = self.rules
        while work:
            m = max(work, key=mono_key)
            c = work.pop(m)
            for lead, rep in rules:
                q = mono_div(m, lead)
                if q is None:
                    continue
                used += 1
                if used > budget:
                    raise NonTerminatingReduction(
                        f"relation reduction exceeded {budget} rule applications")
                for rm, rc in rep.terms.items():
                    k = mono_mul(q, rm)
                    v = work.get(k, C_ZERO) + c * rc
                    if v:
                        work[k] = v
                    else:
                        work.pop(k, None)
                break
            else:
                done[m] = c
        return Polynomial(done)

    def reduce_scalar(self, s: Scalar) -> Scalar:
        if not self.rules:
            return s
        den = self.reduce(s.den)
        if not den.terms:
            raise DivisionByZero(f"denominator of {s} vanishes modulo the relations")
        return Scalar._from(self.reduce(s.num), den)

    def is_zero(self, s: Scalar) -> bool:
        return not self.reduce(s.num).terms

    def __repr__(self):
        body = ", ".join(f"{mono_str(lead)} -> {rep}" for lead, rep in self.rules)
        return f"RelationSet([{body}])"


NO_RELATIONS = RelationSet()


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------

def is_zero(f, rel: Optional[RelationSet] = None) -> bool:
    """Exact zero test of ``f`` in the quotient by ``rel``."""
    f = as_scalar(f)
    if rel is None or not rel.rules:
        return not f.num.terms
    return rel.is_zero(f)


_OPS = {"+": "add", "-": "sub", "*": "mul", "/": "div"}


def arith(op: str, f, g, rel: Optional[RelationSet] = None) -> Scalar:
    """``f op g`` reduced modulo ``rel``; op is add/sub/mul/div or + - * /."""
    f, g = as_scalar(f), as_scalar(g)
    op = _OPS.get(op, op)
    if op == "add":
        out = f + g
    elif op == "sub":
        out = f - g
    elif op == "mul":
        out = f * g
    elif op == "div":
        if is_zero(g, rel):
            raise DivisionByZero(f"division by {g}, which is zero")
        out = f / g
    else:
        raise ValueError(f"unknown operation {op!r}")
    return rel.reduce_scalar(out) if rel else out


def _sid_of(v) -> int:
    if isinstance(v, str):
        return symbol_id(v, create=False)
    if isinstance(v, Scalar):
        if v.den.is_one() and v.num.is_term():
            (m, c), = v.num.terms.items()
            if len(m) == 1 and m[0][1] == 1 and c.is_one():
                return m[0][0]
        raise ValueError(f"{v} is not a bare symbol")
    if isinstance(v, int):
        if 0 <= v < len(_symbol_names):
            return v
        raise UnknownSymbol(f"no symbol with id {v}")
    raise TypeError(f"cannot interpret {v!r} as a symbol")


def partial_derivative(f, v) -> Scalar:
    """Exact derivative of ``f`` with respect to the symbol ``v``."""
    f = as_scalar(f)
    sid = _sid_of(v)
    if sid not in f.symbols():
        return ZERO
    dn = f.num.diff(sid)
    if f.den.is_one():
        return Scalar._trusted(dn, _P_ONE) if dn.terms else ZERO
    dd = f.den.diff(sid)
    return Scalar._from(dn * f.den - f.num * dd, f.den * f.den)


def substitute(f, bindings: Mapping, rel: Optional[RelationSet] = None) -> Scalar:
    """Simultaneous substitution ``{symbol: value}``."""
    f = as_scalar(f)
    b = {_sid_of(k): as_scalar(v) for k, v in bindings.items()}
    num = f.num.subst(b)
    den = f.den.subst(b)
    if is_zero(den, rel):
        raise DivisionByZero(f"substitution makes the denominator of {f} vanish")
    return num / den
