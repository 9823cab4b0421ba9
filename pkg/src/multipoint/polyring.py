"""Exact multivariate polynomial arithmetic over Q.

Polynomials live in a ring described by a VarTable (an ordered list of named
variables with block roles: parameters, base variables, then per-level
lambda/a blocks).  Coefficients are exact rationals; terms are stored as a
dense exponent tuple -> nonzero coefficient map.  The ambient term order is
degree-reverse-lexicographic with earlier variables larger.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Rational = Fraction

Scalar = Union[int, Fraction]


class PolyError(Exception):
    """Base class for errors raised by this package."""


class TableMismatchError(PolyError):
    """Operands constructed over different variable tables."""


class ParseError(PolyError):
    """Syntax error in a polynomial source string."""

    def __init__(self, message: str, src: str, pos: int):
        super().__init__(f"{message} at position {pos}: {src!r}")
        self.src = src
        self.pos = pos


class UnknownVariableError(ParseError):
    """Identifier that does not resolve in the variable table."""


class NotDivisibleError(PolyError):
    """Exact division failed; carries the offending monomial."""

    def __init__(self, variable: str, monomial: str):
        super().__init__(f"monomial {monomial} is not divisible by {variable}")
        self.variable = variable
        self.monomial = monomial


class VarRole:
    """Block tag of a variable: param, base, lambda(level) or a(level, slot)."""

    __slots__ = ("kind", "level", "slot")

    PARAM = "param"
    BASE = "base"
    LAMBDA = "lambda"
    A = "a"

    def __init__(self, kind: str, level: int = 0, slot: int = 0):
        if kind not in (self.PARAM, self.BASE, self.LAMBDA, self.A):
            raise ValueError(f"unknown variable role {kind!r}")
        if kind in (self.LAMBDA, self.A) and level < 1:
            raise ValueError("lambda/a roles need a level >= 1")
        if kind == self.A and slot < 1:
            raise ValueError("a roles need a slot >= 1")
        self.kind = kind
        self.level = level
        self.slot = slot

    def __eq__(self, other):
        return (isinstance(other, VarRole)
                and (self.kind, self.level, self.slot) == (other.kind, other.level, other.slot))

    def __hash__(self):
        return hash((self.kind, self.level, self.slot))

    def __repr__(self):
        if self.kind == self.A:
            return f"VarRole(a, level={self.level}, slot={self.slot})"
        if self.kind == self.LAMBDA:
            return f"VarRole(lambda, level={self.level})"
        return f"VarRole({self.kind})"


class VarTable:
    """Ordered, named variable set shared by all polynomials of a ring."""

    __slots__ = ("names", "roles", "_index")

    def __init__(self, names: Sequence[str], roles: Sequence[VarRole] | None = None):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for nm in names:
            if not nm or not (nm[0].isalpha()) or not all(c.isalnum() or c == "_" for c in nm):
                raise ValueError(f"invalid variable name {nm!r}")
        if roles is None:
            roles = tuple(VarRole(VarRole.BASE) for _ in names)
        else:
            roles = tuple(roles)
            if len(roles) != len(names):
                raise ValueError("names and roles differ in length")
        self.names = names
        self.roles = roles
        self._index = {nm: i for i, nm in enumerate(names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}; table has {self.names}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, VarTable) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VarTable({', '.join(self.names)})"

    def names_with_role(self, kind: str) -> list[str]:
        return [nm for nm, rl in zip(self.names, self.roles) if rl.kind == kind]


def degrevlex_key(exps: Sequence[int]):
    """Sort key realizing degrevlex with earlier table variables larger."""
    return (sum(exps), tuple(-e for e in reversed(exps)))


def _as_fraction(c: Scalar) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Poly:
    """Immutable multivariate polynomial with exact rational coefficients.

    The term map sends dense exponent tuples to nonzero coefficients; the
    zero polynomial has an empty map.  Do not mutate ``terms`` after
    construction: every operation returns a fresh Poly.
    """

    __slots__ = ("table", "terms")

    def __init__(self, table: VarTable, terms: Mapping[tuple, Scalar]):
        clean = {}
        width = len(table)
        for exps, c in terms.items():
            if len(exps) != width:
                raise ValueError(f"exponent vector {exps} has wrong length for {table!r}")
            c = _as_fraction(c)
            if c != 0:
                clean[tuple(exps)] = c
        self.table = table
        self.terms = clean

    # ---- constructors -------------------------------------------------

    @classmethod
    def zero(cls, table: VarTable) -> "Poly":
        return cls(table, {})

    @classmethod
    def constant(cls, table: VarTable, c: Scalar) -> "Poly":
        return cls(table, {(0,) * len(table): c})

    @classmethod
    def variable(cls, table: VarTable, name: str) -> "Poly":
        i = table.index(name)
        exps = [0] * len(table)
        exps[i] = 1
        return cls(table, {tuple(exps): 1})

    # ---- predicates and views -----------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise PolyError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def leading_monomial(self) -> tuple:
        if self.is_zero():
            raise PolyError("zero polynomial has no leading monomial")
        return max(self.terms, key=degrevlex_key)

    def leading_coefficient(self) -> Fraction:
        return self.terms[self.leading_monomial()]

    def variables_used(self) -> list[str]:
        used = set()
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    used.add(i)
        return [self.table.names[i] for i in sorted(used)]

    # ---- ring operations ----------------------------------------------

    def _check(self, other: "Poly"):
        if self.table != other.table:
            raise TableMismatchError(
                f"operands over different tables: {self.table!r} vs {other.table!r}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.table, other)
        self._check(other)
        terms = dict(self.terms)
        for exps, c in other.terms.items():
            s = terms.get(exps, 0) + c
            if s:
                terms[exps] = s
            else:
                terms.pop(exps, None)
        return Poly(self.table, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.table, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.table, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return Poly.zero(self.table)
            return Poly(self.table, {e: c * v for e, v in self.terms.items()})
        self._check(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, 0) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    terms.pop(e, None)
        return Poly(self.table, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.constant(self.table, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __eq__(self, other):
        return (isinstance(other, Poly) and self.table == other.table
                and self.terms == other.terms)

    __hash__ = None

    def __repr__(self):
        return f"Poly({render(self)})"

    def __str__(self):
        return render(self)


# ---- operations ------------------------------------------------------


def substitute(p: Poly, assignment: Mapping[str, Poly | Scalar]) -> Poly:
    """Simultaneous substitution of variables by polynomials, exact expansion."""
    table = p.table
    subs: dict[int, Poly] = {}
    for name, repl in assignment.items():
        if isinstance(repl, (int, Fraction)):
            repl = Poly.constant(table, repl)
        if repl.table != table:
            raise TableMismatchError(f"replacement for {name!r} uses a different table")
        subs[table.index(name)] = repl
    if not subs:
        return p
    # powers of each replacement are cached: chains reuse the same exponents a lot
    power_cache: dict[tuple[int, int], Poly] = {}

    def power(i: int, e: int) -> Poly:
        key = (i, e)
        got = power_cache.get(key)
        if got is None:
            got = subs[i] ** e
            power_cache[key] = got
        return got

    out = Poly.zero(table)
    for exps, c in p.terms.items():
        residual = list(exps)
        factor = None
        for i in subs:
            e = residual[i]
            if e:
                residual[i] = 0
                piece = power(i, e)
                factor = piece if factor is None else factor * piece
        mono = Poly(table, {tuple(residual): c})
        out = out + (mono if factor is None else mono * factor)
    return out


def divide_by_variable(p: Poly, name: str) -> Poly:
    """Exact quotient p / v; every monomial of p must contain v."""
    i = p.table.index(name)
    terms = {}
    for exps, c in p.terms.items():
        if exps[i] == 0:
            raise NotDivisibleError(name, render(Poly(p.table, {exps: c})))
        e = list(exps)
        e[i] -= 1
        terms[tuple(e)] = c
    return Poly(p.table, terms)


def evaluate(p: Poly, point: Sequence[Scalar]) -> Fraction:
    """Exact evaluation at a rational point (one value per table variable)."""
    if len(point) != len(p.table):
        raise ValueError(
            f"point has {len(point)} components, table has {len(p.table)} variables")
    vals = [_as_fraction(v) for v in point]
    total = Fraction(0)
    for exps, c in p.terms.items():
        acc = c
        for v, e in zip(vals, exps):
            if e:
                acc *= v ** e
        total += acc
    return total


def differentiate(p: Poly, name: str) -> Poly:
    """Formal partial derivative with respect to one variable."""
    i = p.table.index(name)
    terms = {}
    for exps, c in p.terms.items():
        e = exps[i]
        if e:
            ne = list(exps)
            ne[i] = e - 1
            ne = tuple(ne)
            terms[ne] = terms.get(ne, 0) + c * e
    return Poly(p.table, terms)


def normalize(p: Poly) -> Poly:
    """Scale by a rational unit: coprime integer coefficients, positive leading one."""
    if p.is_zero():
        return p
    den_lcm = 1
    for c in p.terms.values():
        den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
    num_gcd = 0
    for c in p.terms.values():
        num_gcd = math.gcd(num_gcd, abs(c.numerator * (den_lcm // c.denominator)))
    scale = Fraction(den_lcm, num_gcd)
    if p.leading_coefficient() < 0:
        scale = -scale
    return p * scale


def transplant(p: Poly, table: VarTable,
               mapping: Mapping[str, Poly | Scalar] | None = None) -> Poly:
    """Rebuild p over another table, mapping variables by name.

    Variables listed in ``mapping`` are replaced by the given polynomial over
    the target table; all others must exist in the target table by name.
    """
    mapping = dict(mapping or {})
    images: dict[int, Poly] = {}
    for i, nm in enumerate(p.table.names):
        if nm in mapping:
            repl = mapping[nm]
            if isinstance(repl, (int, Fraction)):
                repl = Poly.constant(table, repl)
            if repl.table != table:
                raise TableMismatchError(f"image of {nm!r} is over the wrong table")
            images[i] = repl
        elif nm in table:
            images[i] = Poly.variable(table, nm)
        else:
            images[i] = None  # only legal if nm never occurs
    out = Poly.zero(table)
    for exps, c in p.terms.items():
        acc = Poly.constant(table, c)
        for i, e in enumerate(exps):
            if e:
                if images[i] is None:
                    raise KeyError(
                        f"variable {p.table.names[i]!r} has no image in {table!r}")
                acc = acc * images[i] ** e
        out = out + acc
    return out


# ---- parsing ---------------------------------------------------------

_TOK_IDENT = "ident"
_TOK_INT = "int"
_TOK_OP = "op"
_TOK_END = "end"


class _Lexer:
    """Tokenizer for the polynomial grammar (strict and compact modes).

    In compact mode an alphanumeric run is split greedily into variable names
    from the table, with digits after a name read as an exponent, so that
    SINGULAR-style input like ``x2+ty`` means ``x^2 + t*y``.
    """

    def __init__(self, src: str, table: VarTable, compact: bool):
        self.src = src
        self.table = table
        self.compact = compact
        self.tokens: list[tuple[str, str, int]] = []
        self._scan()

    def _scan(self):
        src = self.src
        i = 0
        n = len(src)
        while i < n:
            ch = src[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "+-*^()/":
                self.tokens.append((_TOK_OP, ch, i))
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < n and src[j].isdigit():
                    j += 1
                self.tokens.append((_TOK_INT, src[i:j], i))
                i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < n and (src[j].isalnum() or src[j] == "_"):
                    j += 1
                run = src[i:j]
                if self.compact:
                    self._split_run(run, i)
                else:
                    if run not in self.table:
                        raise UnknownVariableError(
                            f"unknown variable {run!r}", self.src, i)
                    self.tokens.append((_TOK_IDENT, run, i))
                i = j
                continue
            raise ParseError(f"unexpected character {ch!r}", src, i)
        self.tokens.append((_TOK_END, "", n))

    def _split_run(self, run: str, base: int):
        pos = 0
        while pos < len(run):
            if run[pos].isdigit():
                j = pos
                while j < len(run) and run[j].isdigit():
                    j += 1
                self.tokens.append((_TOK_OP, "^", base + pos))
                self.tokens.append((_TOK_INT, run[pos:j], base + pos))
                pos = j
                continue
            best = None
            for end in range(len(run), pos, -1):
                if run[pos:end] in self.table:
                    best = end
                    break
            if best is None:
                raise UnknownVariableError(
                    f"cannot resolve {run[pos:]!r} against the variable table",
                    self.src, base + pos)
            self.tokens.append((_TOK_IDENT, run[pos:best], base + pos))
            pos = best


class _Parser:
    """Recursive-descent parser for the grammar in the module docstring."""

    def __init__(self, src: str, table: VarTable, compact: bool):
        self.src = src
        self.table = table
        self.compact = compact
        self.tokens = _Lexer(src, table, compact).tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text: str):
        kind, got, at = self.next()
        if kind != _TOK_OP or got != text:
            raise ParseError(f"expected {text!r}", self.src, at)

    def parse(self) -> Poly:
        p = self.expr()
        kind, text, at = self.peek()
        if kind != _TOK_END:
            raise ParseError(f"unexpected {text!r}", self.src, at)
        return p

    def expr(self) -> Poly:
        negate = False
        kind, text, _ = self.peek()
        if kind == _TOK_OP and text == "-":
            self.next()
            negate = True
        p = self.term()
        if negate:
            p = -p
        while True:
            kind, text, _ = self.peek()
            if kind == _TOK_OP and text in "+-":
                self.next()
                q = self.term()
                p = p + q if text == "+" else p - q
            else:
                return p

    def term(self) -> Poly:
        p = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == _TOK_OP and text == "*":
                self.next()
                p = p * self.factor()
            elif self.compact and (kind == _TOK_IDENT or kind == _TOK_INT
                                   or (kind == _TOK_OP and text == "(")):
                p = p * self.factor()
            else:
                return p

    def factor(self) -> Poly:
        p = self.atom()
        kind, text, _ = self.peek()
        if kind == _TOK_OP and text == "^":
            self.next()
            k, t, at = self.next()
            if k != _TOK_INT:
                raise ParseError("expected integer exponent", self.src, at)
            p = p ** int(t)
        return p

    def atom(self) -> Poly:
        kind, text, at = self.next()
        if kind == _TOK_IDENT:
            return Poly.variable(self.table, text)
        if kind == _TOK_INT:
            return Poly.constant(self.table, int(text))
        if kind == _TOK_OP and text == "(":
            # rational literal (int / int) gets special treatment
            if (self.tokens[self.pos][0] == _TOK_INT
                    and self.tokens[self.pos + 1][:2] == (_TOK_OP, "/")
                    and self.tokens[self.pos + 2][0] == _TOK_INT
                    and self.tokens[self.pos + 3][:2] == (_TOK_OP, ")")):
                num = int(self.next()[1])
                self.next()
                den_tok = self.next()
                den = int(den_tok[1])
                if den == 0:
                    raise ParseError("zero denominator", self.src, den_tok[2])
                self.next()
                return Poly.constant(self.table, Fraction(num, den))
            p = self.expr()
            self.expect_op(")")
            return p
        raise ParseError(f"unexpected {text or 'end of input'!r}", self.src, at)


def parse_poly(src: str, table: VarTable, mode: str = "strict") -> Poly:
    """Parse a polynomial source string over the given variable table.

    ``mode`` is ``"strict"`` (explicit ``*`` and ``^``) or ``"compact"``
    (digit suffix as exponent, juxtaposition as product).
    """
    if mode not in ("strict", "compact"):
        raise ValueError(f"unknown parse mode {mode!r}")
    return _Parser(src, table, mode == "compact").parse()


# ---- rendering -------------------------------------------------------


def _mono_text(table: VarTable, exps: tuple, compact_ok: bool) -> str:
    pieces = []
    for nm, e in zip(table.names, exps):
        if e == 0:
            continue
        if compact_ok:
            pieces.append(nm if e == 1 else f"{nm}{e}")
        else:
            pieces.append(nm if e == 1 else f"{nm}^{e}")
    if compact_ok:
        return "".join(pieces)
    return "*".join(pieces)


def _coeff_text(c: Fraction) -> str:
    if c.denominator == 1:
        return str(abs(c.numerator))
    return f"({abs(c.numerator)}/{c.denominator})"


def render(p: Poly, style: str = "strict") -> str:
    """Canonical text form; terms sorted descending in the ambient order.

    Strict style is unambiguous and always re-parses to the same polynomial.
    Compact style drops ``*``/``^`` only when every variable name is a single
    letter, which is the only case where re-lexing is unambiguous.
    """
    if style not in ("strict", "compact"):
        raise ValueError(f"unknown render style {style!r}")
    if p.is_zero():
        return "0"
    compact_ok = style == "compact" and all(
        len(nm) == 1 and nm.isalpha() for nm in p.table.names)
    out = []
    for exps in sorted(p.terms, key=degrevlex_key, reverse=True):
        c = p.terms[exps]
        mono = _mono_text(p.table, exps, compact_ok)
        if not mono:
            body = _coeff_text(c)
        elif abs(c) == 1:
            body = mono
        elif compact_ok:
            body = _coeff_text(c) + mono
        else:
            body = _coeff_text(c) + "*" + mono
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("-" if c < 0 else "+") + body)
    return "".join(out)
