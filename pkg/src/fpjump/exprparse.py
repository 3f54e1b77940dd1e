"""Parser and evaluator for scalar coefficient expressions in one variable.

Coefficients such as drifts and diffusions are written as plain text,
e.g. ``"cos(x)*exp(sin(x))"``.  The grammar, lowest precedence first:

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?          right associative
    atom   := NUMBER | 'x' | 'pi' | NAME '(' expr ')' | '(' expr ')'

'^' binds tighter than unary minus, so ``-x^2`` means ``-(x^2)``.  The
exponent position accepts a leading minus (``x^-2``).  Recognized
functions: sin, cos, exp, abs, sqrt, tanh.

Evaluation is exact about domain violations: division by zero, even
roots of negative numbers, fractional powers of negative bases and
overflow all raise :class:`DomainEvalError` instead of propagating NaN
or infinity.  Integer powers with small constant exponents are computed
by repeated multiplication; everything else goes through the usual
``pow`` semantics.

``print_expr`` emits a minimally parenthesized form whose re-parse is
structurally identical to the original tree, and literals are printed
with ``repr`` so their values survive the round trip bit for bit.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainEvalError, ExprSyntaxError

__all__ = [
    "Expr",
    "Num",
    "Var",
    "Const",
    "Neg",
    "Bin",
    "Call",
    "parse",
    "eval_expr",
    "print_expr",
    "has_var",
]

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "abs": np.abs,
    "sqrt": np.sqrt,
    "tanh": np.tanh,
}

CONSTANTS = {"pi": math.pi}

# Exponents up to this magnitude, when they are constants with integer
# values, are evaluated by repeated multiplication.
_INT_POW_LIMIT = 64


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


Expr = Num | Var | Const | Neg | Bin | Call

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            # skip leading whitespace before complaining
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ExprSyntaxError(
                f"unexpected character {stripped[0]!r}", len(text) - len(stripped)
            )
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}", off)
        self.advance()

    def parse(self) -> Expr:
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {val!r}", off)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                node = Bin(val, node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                node = Bin(val, node, self.factor())
            else:
                return node

    def factor(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            return Bin("^", base, self.factor())
        return base

    def atom(self) -> Expr:
        kind, val, off = self.advance()
        if kind == "num":
            value = float(val)
            if not math.isfinite(value):
                raise ExprSyntaxError(f"numeric literal {val!r} overflows", off)
            return Num(value)
        if kind == "name":
            if val == "x":
                return Var()
            if val in CONSTANTS:
                return Const(val)
            if val in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(val, arg)
            raise ExprSyntaxError(f"unknown identifier {val!r}", off)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(
            f"expected a value, got {val!r}" if val else "unexpected end of input", off
        )


def parse(text: str) -> Expr:
    """Parse expression text into a tree, or raise :class:`ExprSyntaxError`."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text).parse()


def has_var(node: Expr) -> bool:
    """True when the subtree references the variable x."""
    if isinstance(node, Var):
        return True
    if isinstance(node, (Num, Const)):
        return False
    if isinstance(node, Neg):
        return has_var(node.arg)
    if isinstance(node, Call):
        return has_var(node.arg)
    return has_var(node.lhs) or has_var(node.rhs)


def _bad_at(values, x):
    """First x where values is non-finite, for error messages."""
    bad = ~np.isfinite(np.asarray(values))
    if np.ndim(x) == 0:
        return float(x)
    return float(np.asarray(x)[np.argmax(bad)])


def _check_finite(values, node: Expr, x):
    if np.all(np.isfinite(values)):
        return values
    raise DomainEvalError(
        f"expression {print_expr(node)!r} is not finite at x = {_bad_at(values, x)!r}"
    )


def _pow(node: Bin, x):
    base = _eval(node.lhs, x)
    if not has_var(node.rhs):
        e = float(_eval(node.rhs, 0.0))
        if e == round(e) and abs(e) <= _INT_POW_LIMIT:
            n = int(round(e))
            acc = np.ones_like(np.asarray(base, dtype=float))
            for _ in range(abs(n)):
                acc = acc * base
            if n < 0:
                with np.errstate(divide="ignore"):
                    acc = 1.0 / acc
            return _check_finite(acc if np.ndim(x) else float(acc), node, x)
    expo = _eval(node.rhs, x)
    with np.errstate(all="ignore"):
        out = np.power(base, expo)
    return _check_finite(out, node, x)


def _eval(node: Expr, x):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Neg):
        return -_eval(node.arg, x)
    if isinstance(node, Call):
        with np.errstate(all="ignore"):
            out = FUNCTIONS[node.fn](_eval(node.arg, x))
        return _check_finite(out, node, x)
    if node.op == "^":
        return _pow(node, x)
    a = _eval(node.lhs, x)
    b = _eval(node.rhs, x)
    with np.errstate(all="ignore"):
        if node.op == "+":
            out = a + b
        elif node.op == "-":
            out = a - b
        elif node.op == "*":
            out = a * b
        else:
            out = np.divide(a, b)
    return _check_finite(out, node, x)


def eval_expr(node: Expr, x):
    """Evaluate the tree at x (scalar or ndarray).

    Scalars come back as python floats, arrays as float64 arrays of the
    input shape even when the expression is constant.  Any non-finite
    intermediate raises :class:`DomainEvalError` naming the offending
    subexpression and an x where it fails.
    """
    out = _eval(node, x)
    if np.ndim(x) == 0:
        return float(out)
    return np.broadcast_to(
        np.asarray(out, dtype=float), np.shape(x)
    ).copy()


# Precedence levels used when printing: higher binds tighter.
_LEVEL_ADD, _LEVEL_MUL, _LEVEL_NEG, _LEVEL_POW, _LEVEL_ATOM = 1, 2, 3, 4, 5


def _level(node: Expr) -> int:
    if isinstance(node, (Num, Var, Const, Call)):
        return _LEVEL_ATOM
    if isinstance(node, Neg):
        return _LEVEL_NEG
    return _LEVEL_POW if node.op == "^" else (_LEVEL_MUL if node.op in "*/" else _LEVEL_ADD)


def _wrap(node: Expr, minimum: int) -> str:
    text = print_expr(node)
    return f"({text})" if _level(node) < minimum else text


def print_expr(node: Expr) -> str:
    """Render the tree as text that parses back to an identical tree."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Call):
        return f"{node.fn}({print_expr(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, _LEVEL_NEG)
    if node.op == "^":
        # left operand must be an atom; the exponent slot admits unary minus
        return _wrap(node.lhs, _LEVEL_ATOM) + "^" + _wrap(node.rhs, _LEVEL_NEG)
    if node.op in "*/":
        # the grammar is left associative, so a mul-level right operand
        # must keep its parentheses to survive the round trip
        return _wrap(node.lhs, _LEVEL_MUL) + node.op + _wrap(node.rhs, _LEVEL_MUL + 1)
    left = _wrap(node.lhs, _LEVEL_ADD)
    right = _wrap(node.rhs, _LEVEL_ADD + 1)
    return left + node.op + right
