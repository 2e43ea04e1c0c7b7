"""Symbolic expressions in one variable ``t``.

A small, closed expression language for time-dependent coefficient
functions: arithmetic, integer powers, a fixed set of elementary
functions, and a deferred definite integral ``integral(e)`` standing for
the map t -> integral of e(s) ds from 0 to t, evaluated by adaptive
quadrature on demand.  Trees are immutable and hashable; differentiation
is exact on the whole grammar (the integral node differentiates back to
its integrand).

The text syntax accepted by :func:`parse` is also the coefficient syntax
of the CLI problem files: infix ``+ - * / ^`` (``**`` is accepted for
``^``) with the usual precedence, parentheses, decimal literals, the
variable ``t``, and calls of ``sqrt exp log sin cos tan tanh arctan
integral``.

There is deliberately no general simplifier.  Only local constant
folding is performed (``0*e -> 0``, ``e+0 -> e``, ``1*e -> e`` and
arithmetic on literal constants); everything downstream compares
expressions numerically on grids, never structurally.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from scipy.integrate import quad

__all__ = [
    "Expr", "Const", "Var", "Neg", "Add", "Sub", "Mul", "Div", "Pow",
    "Call", "Integral", "T", "ZERO", "ONE",
    "parse", "evaluate", "differentiate", "substitute", "integral_from",
    "as_expr", "sqrt", "exp", "log", "sin", "cos", "tan", "tanh",
    "arctan", "integral",
    "ExprError", "ParseError", "EvalDomainError", "QuadratureError",
]


class ExprError(ValueError):
    """Base class for errors raised by this module."""


class ParseError(ExprError):
    """Syntax error in expression text, with the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EvalDomainError(ExprError):
    """Evaluation left the real domain (log of non-positive, sqrt of
    negative, division by zero, overflow).  Carries the offending
    subexpression."""

    def __init__(self, kind: str, subexpr: "Expr"):
        super().__init__(f"{kind} in '{subexpr}'")
        self.kind = kind
        self.subexpr = subexpr


class QuadratureError(ExprError):
    """Adaptive quadrature of a deferred integral did not converge."""


class Expr:
    """Abstract expression node.  Immutable; supports ``+ - * / **``
    against other expressions and numbers."""

    __slots__ = ()
    precedence = 4

    def ev(self, t: float) -> float:
        raise NotImplementedError

    def diff(self) -> "Expr":
        raise NotImplementedError

    def _fmt(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self._fmt()

    # Operator sugar; numbers coerce to Const.
    def __add__(self, other):
        return _add(self, as_expr(other))

    def __radd__(self, other):
        return _add(as_expr(other), self)

    def __sub__(self, other):
        return _sub(self, as_expr(other))

    def __rsub__(self, other):
        return _sub(as_expr(other), self)

    def __mul__(self, other):
        return _mul(self, as_expr(other))

    def __rmul__(self, other):
        return _mul(as_expr(other), self)

    def __truediv__(self, other):
        return _div(self, as_expr(other))

    def __rtruediv__(self, other):
        return _div(as_expr(other), self)

    def __pow__(self, n):
        return _pow(self, n)

    def __neg__(self):
        return _neg(self)


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: float

    def ev(self, t):
        return self.value

    def diff(self):
        return ZERO

    def _fmt(self):
        return format(self.value, ".17g")


@dataclass(frozen=True, slots=True)
class Var(Expr):
    """The independent variable t."""

    def ev(self, t):
        return t

    def diff(self):
        return ONE

    def _fmt(self):
        return "t"


def _prec_of(e: Expr) -> int:
    # A negative literal prints with a leading '-', so it binds like Neg.
    if isinstance(e, Const) and math.copysign(1.0, e.value) < 0:
        return 2
    return e.precedence


def _wrap(e: Expr, minimum: int) -> str:
    s = e._fmt()
    return f"({s})" if _prec_of(e) < minimum else s


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr
    precedence = 2

    def ev(self, t):
        return -self.arg.ev(t)

    def diff(self):
        return _neg(self.arg.diff())

    def _fmt(self):
        return "-" + _wrap(self.arg, 2)


@dataclass(frozen=True, slots=True)
class Add(Expr):
    left: Expr
    right: Expr
    precedence = 1

    def ev(self, t):
        return self.left.ev(t) + self.right.ev(t)

    def diff(self):
        return _add(self.left.diff(), self.right.diff())

    def _fmt(self):
        # Right operand keeps parentheses at equal precedence so the
        # printed text re-parses to the same association (and hence the
        # same floating-point value).
        r = self.right
        rs = f"({r._fmt()})" if _prec_of(r) <= 1 else r._fmt()
        return f"{_wrap(self.left, 1)} + {rs}"


@dataclass(frozen=True, slots=True)
class Sub(Expr):
    left: Expr
    right: Expr
    precedence = 1

    def ev(self, t):
        return self.left.ev(t) - self.right.ev(t)

    def diff(self):
        return _sub(self.left.diff(), self.right.diff())

    def _fmt(self):
        r = self.right
        rs = f"({r._fmt()})" if _prec_of(r) <= 1 else r._fmt()
        return f"{_wrap(self.left, 1)} - {rs}"


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    left: Expr
    right: Expr
    precedence = 2

    def ev(self, t):
        return self.left.ev(t) * self.right.ev(t)

    def diff(self):
        return _add(_mul(self.left.diff(), self.right),
                    _mul(self.left, self.right.diff()))

    def _fmt(self):
        r = self.right
        rs = f"({r._fmt()})" if isinstance(r, (Mul, Div)) or _prec_of(r) < 2 \
            else r._fmt()
        return f"{_wrap(self.left, 2)}*{rs}"


@dataclass(frozen=True, slots=True)
class Div(Expr):
    left: Expr
    right: Expr
    precedence = 2

    def ev(self, t):
        den = self.right.ev(t)
        if den == 0.0:
            raise EvalDomainError("division by zero", self)
        return self.left.ev(t) / den

    def diff(self):
        num = _sub(_mul(self.left.diff(), self.right),
                   _mul(self.left, self.right.diff()))
        return _div(num, _pow(self.right, 2))

    def _fmt(self):
        r = self.right
        rs = f"({r._fmt()})" if isinstance(r, (Mul, Div)) or _prec_of(r) < 2 \
            else r._fmt()
        return f"{_wrap(self.left, 2)}/{rs}"


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: int
    precedence = 3

    def ev(self, t):
        b = self.base.ev(t)
        if b == 0.0 and self.exponent < 0:
            raise EvalDomainError("division by zero", self)
        return b ** self.exponent

    def diff(self):
        n = self.exponent
        return _mul(_mul(Const(float(n)), _pow(self.base, n - 1)),
                    self.base.diff())

    def _fmt(self):
        bs = _wrap(self.base, 4)
        return f"{bs}^{self.exponent}"


_FUNCTION_NAMES = ("sqrt", "exp", "log", "sin", "cos", "tan", "tanh", "arctan")


@dataclass(frozen=True, slots=True)
class Call(Expr):
    name: str
    arg: Expr

    def ev(self, t):
        u = self.arg.ev(t)
        name = self.name
        if name == "exp":
            return math.exp(u)
        if name == "sqrt":
            if u < 0.0:
                raise EvalDomainError("sqrt of negative value", self)
            return math.sqrt(u)
        if name == "log":
            if u <= 0.0:
                raise EvalDomainError("log of non-positive value", self)
            return math.log(u)
        if name == "sin":
            return math.sin(u)
        if name == "cos":
            return math.cos(u)
        if name == "tan":
            return math.tan(u)
        if name == "tanh":
            return math.tanh(u)
        return math.atan(u)  # arctan

    def diff(self):
        u = self.arg
        du = u.diff()
        name = self.name
        if name == "sqrt":
            return _div(du, _mul(Const(2.0), Call("sqrt", u)))
        if name == "exp":
            return _mul(du, Call("exp", u))
        if name == "log":
            return _div(du, u)
        if name == "sin":
            return _mul(du, Call("cos", u))
        if name == "cos":
            return _neg(_mul(du, Call("sin", u)))
        if name == "tan":
            return _div(du, _pow(Call("cos", u), 2))
        if name == "tanh":
            return _mul(du, _sub(ONE, _pow(Call("tanh", u), 2)))
        # arctan
        return _div(du, _add(ONE, _pow(u, 2)))

    def _fmt(self):
        return f"{self.name}({self.arg._fmt()})"


@dataclass(frozen=True, slots=True)
class Integral(Expr):
    """Deferred definite integral of the integrand from 0 to t.

    Evaluated numerically by adaptive quadrature (absolute tolerance
    1e-12); values are cached per node, so repeated evaluation on a grid
    costs one quadrature per distinct t.
    """

    integrand: Expr
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def ev(self, t):
        hit = self._cache.get(t)
        if hit is not None:
            return hit
        f = self.integrand
        out = quad(f.ev, 0.0, t, epsabs=1e-13, epsrel=1e-13,
                   limit=500, full_output=1)
        value, abserr = out[0], out[1]
        if abserr > 1e-10 * (1.0 + abs(value)):
            raise QuadratureError(
                f"quadrature of '{f}' over [0, {t}] did not converge "
                f"(error estimate {abserr:.3g})")
        self._cache[t] = value
        return value

    def diff(self):
        return self.integrand

    def _fmt(self):
        return f"integral({self.integrand._fmt()})"


ZERO = Const(0.0)
ONE = Const(1.0)
T = Var()


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, float)):
        return Const(float(v))
    raise TypeError(f"cannot interpret {v!r} as an expression")


# Folding constructors.  Only local constant folding; no rewriting.

def _add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const):
        if a.value == 0.0:
            return b
        if isinstance(b, Const):
            return Const(a.value + b.value)
    if isinstance(b, Const) and b.value == 0.0:
        return a
    return Add(a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if isinstance(b, Const):
        if b.value == 0.0:
            return a
        if isinstance(a, Const):
            return Const(a.value - b.value)
    if isinstance(a, Const) and a.value == 0.0:
        return _neg(b)
    return Sub(a, b)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const):
        if a.value == 0.0:
            return ZERO
        if a.value == 1.0:
            return b
        if isinstance(b, Const):
            return Const(a.value * b.value)
    if isinstance(b, Const):
        if b.value == 0.0:
            return ZERO
        if b.value == 1.0:
            return a
    return Mul(a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if isinstance(b, Const):
        if b.value == 1.0:
            return a
        if isinstance(a, Const) and b.value != 0.0:
            return Const(a.value / b.value)
    if isinstance(a, Const) and a.value == 0.0:
        return ZERO
    return Div(a, b)


def _pow(a: Expr, n) -> Expr:
    if not isinstance(n, int):
        raise TypeError("power exponent must be an integer")
    if n == 0:
        return ONE
    if n == 1:
        return a
    if isinstance(a, Const) and not (a.value == 0.0 and n < 0):
        try:
            return Const(float(a.value ** n))
        except OverflowError:
            pass
    return Pow(a, n)


# Named builders for the function grammar.

def sqrt(e) -> Expr:
    return Call("sqrt", as_expr(e))


def exp(e) -> Expr:
    return Call("exp", as_expr(e))


def log(e) -> Expr:
    return Call("log", as_expr(e))


def sin(e) -> Expr:
    return Call("sin", as_expr(e))


def cos(e) -> Expr:
    return Call("cos", as_expr(e))


def tan(e) -> Expr:
    return Call("tan", as_expr(e))


def tanh(e) -> Expr:
    return Call("tanh", as_expr(e))


def arctan(e) -> Expr:
    return Call("arctan", as_expr(e))


def integral(e) -> Expr:
    return Integral(as_expr(e))


def integral_from(e, lower: float) -> Expr:
    """Integral of ``e`` from ``lower`` to t, as an expression.

    Anchors other than 0 are handled by subtracting the constant value
    of the 0-anchored node at ``lower`` (both terms share one node, and
    therefore one quadrature cache).
    """
    node = Integral(as_expr(e))
    if lower == 0.0:
        return node
    return _sub(node, Const(node.ev(lower)))


def evaluate(e: Expr, t: float) -> float:
    """Evaluate ``e`` at ``t``.  Returns a finite float or raises
    :class:`EvalDomainError` / :class:`QuadratureError`."""
    try:
        v = e.ev(float(t))
    except OverflowError as exc:
        raise EvalDomainError("overflow", e) from exc
    if not math.isfinite(v):
        raise EvalDomainError("overflow", e)
    return v


def differentiate(e: Expr) -> Expr:
    """Exact symbolic derivative with respect to t."""
    return e.diff()


def substitute(e: Expr, replacement: Expr) -> Expr:
    """Replace the variable t by ``replacement`` everywhere in ``e``.

    Not defined for trees containing deferred integrals (their upper
    limit is the variable itself, so composition would leave the
    grammar).
    """
    if isinstance(e, Var):
        return replacement
    if isinstance(e, Const):
        return e
    if isinstance(e, Neg):
        return _neg(substitute(e.arg, replacement))
    if isinstance(e, Add):
        return _add(substitute(e.left, replacement), substitute(e.right, replacement))
    if isinstance(e, Sub):
        return _sub(substitute(e.left, replacement), substitute(e.right, replacement))
    if isinstance(e, Mul):
        return _mul(substitute(e.left, replacement), substitute(e.right, replacement))
    if isinstance(e, Div):
        return _div(substitute(e.left, replacement), substitute(e.right, replacement))
    if isinstance(e, Pow):
        return _pow(substitute(e.base, replacement), e.exponent)
    if isinstance(e, Call):
        return Call(e.name, substitute(e.arg, replacement))
    raise ExprError("cannot substitute into a deferred integral")


# Parser.

_TOKEN_RE = re.compile(
    r"(\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|([A-Za-z_][A-Za-z_0-9]*)"
    r"|(\*\*|[-+*/^()])"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        num, ident, op = m.groups()
        if num is not None:
            tokens.append(("num", num, pos))
        elif ident is not None:
            tokens.append(("ident", ident, pos))
        else:
            tokens.append(("op", op, pos))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}", pos)
        self.advance()

    def parse(self) -> Expr:
        e = self.expression()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", pos)
        return e

    def expression(self) -> Expr:
        e = self.term()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                rhs = self.term()
                e = Add(e, rhs) if text == "+" else Sub(e, rhs)
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                rhs = self.unary()
                e = Mul(e, rhs) if text == "*" else Div(e, rhs)
            else:
                return e

    def unary(self) -> Expr:
        kind, text, pos = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.unary())
        if kind == "op" and text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, pos = self.peek()
        if kind == "op" and text in ("^", "**"):
            self.advance()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        kind, text, pos = self.peek()
        if kind == "op" and text == "(":
            self.advance()
            n = self.exponent()
            self.expect_op(")")
            return n
        sign = 1
        if kind == "op" and text == "-":
            self.advance()
            sign = -1
            kind, text, pos = self.peek()
        if kind != "num" or not text.isdigit():
            raise ParseError("exponent must be an integer literal", pos)
        self.advance()
        return sign * int(text)

    def atom(self) -> Expr:
        kind, text, pos = self.advance()
        if kind == "num":
            return Const(float(text))
        if kind == "ident":
            if text == "t":
                return T
            if text == "integral":
                self.expect_op("(")
                inner = self.expression()
                self.expect_op(")")
                return Integral(inner)
            if text in _FUNCTION_NAMES:
                self.expect_op("(")
                inner = self.expression()
                self.expect_op(")")
                return Call(text, inner)
            raise ParseError(f"unknown function or identifier {text!r}", pos)
        if kind == "op" and text == "(":
            inner = self.expression()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected {text!r}" if text else "unexpected end of input", pos)


def parse(text: str) -> Expr:
    """Parse expression text into a tree.  Raises :class:`ParseError`
    with the byte offset of the first problem."""
    return _Parser(text).parse()
