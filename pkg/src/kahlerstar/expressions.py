"""Complex-analytic expression language over a polarized chart.

Expressions are written over the ``2n`` formally independent variables
``z1..zn`` and ``zb1..zbn``; the barred variables are independent symbols,
not conjugates applied to the unbarred ones.  Grammar::

    expr   := '-' expr | term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' ['-'] integer)?
    base   := number | number 'i' | 'i' | var | '(' expr ')'
            | ('log'|'exp'|'-') '(' expr ')'
    var    := 'z' index | 'zb' index

Unary minus binds loosest: ``-a+b`` parses as ``-(a+b)``.  Numbers are
decimal floats without exponents; ``i`` is reserved for the imaginary
unit.  The parser folds literal constants appearing in additive position
(``1+2i`` becomes a single complex literal) and folds negation of
literals, so :func:`to_source` round-trips structurally.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Sequence

from .jets import Jet

__all__ = [
    "Expr",
    "Literal",
    "Var",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Neg",
    "Pow",
    "Log",
    "Exp",
    "HolomorphyClass",
    "ExpressionError",
    "EvaluationError",
    "parse",
    "parse_complex",
    "to_source",
    "eval_jet",
    "eval_value",
    "substitute",
    "classify",
    "formal_conjugate",
]


class ExpressionError(ValueError):
    """Syntax or validation error in an expression source string."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EvaluationError(ArithmeticError):
    """Expression not analytic at the base point (pole or branch violation)."""


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Literal(Expr):
    value: complex


@dataclass(frozen=True)
class Var(Expr):
    index: int  # 1-based, matching the variable name
    barred: bool


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Log(Expr):
    arg: Expr


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr


class HolomorphyClass(enum.Enum):
    HOLOMORPHIC = "holomorphic"
    ANTIHOLOMORPHIC = "antiholomorphic"
    MIXED = "mixed"
    CONSTANT = "constant"


# -- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<number>\d+\.\d*|\.\d+|\d+)(?P<imag>i\b)?
      | (?P<name>[A-Za-z]+\d*)
      | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_VAR_RE = re.compile(r"^(zb|z)(\d+)$")


@dataclass(frozen=True)
class _Token:
    kind: str  # "number", "imag", "name", or the operator character
    value: object
    pos: int


def _tokenize(src: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(src):
        match = _TOKEN_RE.match(src, pos)
        if match is None:
            raise ExpressionError(f"unexpected character {src[pos]!r}", pos)
        if match.lastgroup != "ws":
            if match.group("number") is not None:
                kind = "imag" if match.group("imag") else "number"
                tokens.append(_Token(kind, float(match.group("number")), pos))
            elif match.group("name") is not None:
                tokens.append(_Token("name", match.group("name"), pos))
            else:
                tokens.append(_Token(match.group("op"), match.group("op"), pos))
        pos = match.end()
    tokens.append(_Token("end", None, len(src)))
    return tokens


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, src: str, n: int):
        self.tokens = _tokenize(src)
        self.n = n
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ExpressionError(f"expected {kind!r}", tok.pos)
        return self.advance()

    def parse_expr(self) -> Expr:
        if self.peek().kind == "-":
            self.advance()
            return _negate(self.parse_expr())
        node = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            right = self.parse_term()
            if isinstance(node, Literal) and isinstance(right, Literal):
                node = Literal(node.value + right.value if op == "+" else node.value - right.value)
            else:
                node = Add(node, right) if op == "+" else Sub(node, right)
        return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            right = self.parse_factor()
            node = Mul(node, right) if op == "*" else Div(node, right)
        return node

    def parse_factor(self) -> Expr:
        base = self.parse_base()
        if self.peek().kind == "^":
            self.advance()
            sign = 1
            if self.peek().kind == "-":
                self.advance()
                sign = -1
            tok = self.expect("number")
            if tok.value != int(tok.value):
                raise ExpressionError("exponents must be integers", tok.pos)
            return Pow(base, sign * int(tok.value))
        return base

    def parse_base(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Literal(complex(tok.value))
        if tok.kind == "imag":
            self.advance()
            return Literal(complex(0.0, tok.value))
        if tok.kind == "(":
            self.advance()
            node = self.parse_expr()
            self.expect(")")
            return node
        if tok.kind == "-":
            self.advance()
            self.expect("(")
            node = self.parse_expr()
            self.expect(")")
            return _negate(node)
        if tok.kind == "name":
            self.advance()
            name = tok.value
            if name == "i":
                return Literal(1j)
            if name in ("log", "exp"):
                self.expect("(")
                node = self.parse_expr()
                self.expect(")")
                return Log(node) if name == "log" else Exp(node)
            var = _VAR_RE.match(name)
            if var:
                index = int(var.group(2))
                if not 1 <= index <= self.n:
                    raise ExpressionError(
                        f"variable {name!r} out of range for dimension {self.n}", tok.pos
                    )
                return Var(index, var.group(1) == "zb")
            raise ExpressionError(f"unknown identifier {name!r}", tok.pos)
        raise ExpressionError("expected a number, variable or '('", tok.pos)


def _negate(node: Expr) -> Expr:
    if isinstance(node, Literal):
        return Literal(-node.value)
    return Neg(node)


def parse(src: str, n: int) -> Expr:
    """Parse ``src`` into an expression tree over an ``n``-dimensional chart."""
    parser = _Parser(src, n)
    node = parser.parse_expr()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ExpressionError(f"unexpected {trailing.kind!r}", trailing.pos)
    return node


def parse_complex(text: str) -> complex:
    """Parse a constant such as ``0.3+0.2i`` into a complex number."""
    node = parse(text, 0)
    return eval_value(node, (), ())


# -- printing ----------------------------------------------------------------


def _fmt_float(x: float) -> str:
    x = x + 0.0  # normalize -0.0
    return format(Decimal(repr(x)), "f")


def _literal_source(value: complex) -> str:
    re_, im = value.real, value.imag
    if re_ < 0 or (re_ == 0 and im < 0):
        inner = _literal_source(-value)
        if inner.startswith("(") and inner.endswith(")"):
            return f"-{inner}"
        return f"-({inner})"
    if im == 0:
        return _fmt_float(re_)
    if re_ == 0:
        return _fmt_float(im) + "i"
    # parenthesized so the inner sign cannot rebind in '*', '/' or '^' context
    sign = "+" if im > 0 else "-"
    return f"({_fmt_float(re_)}{sign}{_fmt_float(abs(im))}i)"


def _prints_with_leading_minus(node: Expr) -> bool:
    # A bare leading '-' would be re-read as the loosest-binding unary minus.
    return isinstance(node, Neg) or (
        isinstance(node, Literal)
        and (node.value.real < 0 or (node.value.real == 0 and node.value.imag < 0))
    )


def to_source(expr: Expr) -> str:
    """Render an expression tree back to parseable source (for diagnostics)."""
    if isinstance(expr, Literal):
        return _literal_source(expr.value)
    if isinstance(expr, Var):
        return f"{'zb' if expr.barred else 'z'}{expr.index}"
    if isinstance(expr, (Add, Sub)):
        op = "+" if isinstance(expr, Add) else "-"
        left = to_source(expr.left)
        if _prints_with_leading_minus(expr.left):
            left = f"({left})"
        right = to_source(expr.right)
        if isinstance(expr.right, (Add, Sub, Neg)):
            right = f"({right})"
        return f"{left}{op}{right}"
    if isinstance(expr, (Mul, Div)):
        op = "*" if isinstance(expr, Mul) else "/"
        left = to_source(expr.left)
        if isinstance(expr.left, (Add, Sub)) or _prints_with_leading_minus(expr.left):
            left = f"({left})"
        right = to_source(expr.right)
        if isinstance(expr.right, (Add, Sub, Neg, Mul, Div)):
            right = f"({right})"
        return f"{left}{op}{right}"
    if isinstance(expr, Neg):
        return f"-({to_source(expr.arg)})"
    if isinstance(expr, Pow):
        base = to_source(expr.base)
        if not isinstance(expr.base, Var):
            base = f"({base})"
        return f"{base}^{expr.exponent}"
    if isinstance(expr, Log):
        return f"log({to_source(expr.arg)})"
    if isinstance(expr, Exp):
        return f"exp({to_source(expr.arg)})"
    raise TypeError(f"not an expression node: {expr!r}")


# -- evaluation ---------------------------------------------------------------


def eval_jet(expr: Expr, z0: Sequence[complex], zb0: Sequence[complex], order: int) -> Jet:
    """Jet of ``expr`` at the base point ``(z0, zb0)``, truncated at ``order``.

    Raises :class:`EvaluationError` when the expression is not analytic at
    the point (division by zero, log argument on the branch cut).
    """
    n = len(z0)
    if len(zb0) != n:
        raise ValueError("z0 and zb0 must have the same length")
    z0 = tuple(complex(v) for v in z0)
    zb0 = tuple(complex(v) for v in zb0)

    def rec(node: Expr) -> Jet:
        if isinstance(node, Literal):
            return Jet.constant(node.value, n, order)
        if isinstance(node, Var):
            if node.index > n:
                raise EvaluationError(
                    f"variable index {node.index} exceeds the chart dimension {n}"
                )
            base = zb0[node.index - 1] if node.barred else z0[node.index - 1]
            return Jet.coordinate(n, order, node.index - 1, base, barred=node.barred)
        if isinstance(node, Add):
            return rec(node.left) + rec(node.right)
        if isinstance(node, Sub):
            return rec(node.left) - rec(node.right)
        if isinstance(node, Mul):
            return rec(node.left) * rec(node.right)
        if isinstance(node, Neg):
            return -rec(node.arg)
        try:
            if isinstance(node, Div):
                return rec(node.left) * rec(node.right).reciprocal()
            if isinstance(node, Pow):
                return rec(node.base) ** node.exponent
            if isinstance(node, Log):
                return rec(node.arg).log()
            if isinstance(node, Exp):
                return rec(node.arg).exp()
        except EvaluationError:
            raise
        except ArithmeticError as exc:
            raise EvaluationError(f"{exc} in '{to_source(node)}'") from exc
        raise TypeError(f"not an expression node: {node!r}")

    return rec(expr)


def eval_value(expr: Expr, z0: Sequence[complex], zb0: Sequence[complex]) -> complex:
    """Numerical value of ``expr`` at the point ``(z0, zb0)``."""
    return eval_jet(expr, z0, zb0, 0).value()


# -- structural operations -----------------------------------------------------


def substitute(expr: Expr, replacements: Sequence[Expr]) -> Expr:
    """Capture-free substitution of all ``2n`` variables.

    ``replacements`` lists the images of ``z1..zn`` followed by those of
    ``zb1..zbn``.
    """
    if len(replacements) % 2 != 0:
        raise ValueError("replacement list must cover all 2n variables")
    n = len(replacements) // 2

    def rec(node: Expr) -> Expr:
        if isinstance(node, Literal):
            return node
        if isinstance(node, Var):
            if node.index > n:
                raise ValueError(
                    f"replacement list of length {2 * n} does not cover variable index {node.index}"
                )
            return replacements[node.index - 1 + (n if node.barred else 0)]
        if isinstance(node, Add):
            return Add(rec(node.left), rec(node.right))
        if isinstance(node, Sub):
            return Sub(rec(node.left), rec(node.right))
        if isinstance(node, Mul):
            return Mul(rec(node.left), rec(node.right))
        if isinstance(node, Div):
            return Div(rec(node.left), rec(node.right))
        if isinstance(node, Neg):
            return Neg(rec(node.arg))
        if isinstance(node, Pow):
            return Pow(rec(node.base), node.exponent)
        if isinstance(node, Log):
            return Log(rec(node.arg))
        if isinstance(node, Exp):
            return Exp(rec(node.arg))
        raise TypeError(f"not an expression node: {node!r}")

    return rec(expr)


def classify(expr: Expr) -> HolomorphyClass:
    """Syntactic holomorphy class: which variable groups occur at all."""
    has_z = False
    has_zb = False
    stack = [expr]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            if node.barred:
                has_zb = True
            else:
                has_z = True
        elif isinstance(node, (Add, Sub, Mul, Div)):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, (Neg, Log, Exp)):
            stack.append(node.arg)
        elif isinstance(node, Pow):
            stack.append(node.base)
    if has_z and has_zb:
        return HolomorphyClass.MIXED
    if has_z:
        return HolomorphyClass.HOLOMORPHIC
    if has_zb:
        return HolomorphyClass.ANTIHOLOMORPHIC
    return HolomorphyClass.CONSTANT


def formal_conjugate(expr: Expr) -> Expr:
    """Swap each ``z_k`` with ``zb_k`` and conjugate every literal.

    For a holomorphic expression this produces the antiholomorphic
    expression whose diagonal restriction is the complex conjugate.
    """
    if isinstance(expr, Literal):
        return Literal(expr.value.conjugate())
    if isinstance(expr, Var):
        return Var(expr.index, not expr.barred)
    if isinstance(expr, Add):
        return Add(formal_conjugate(expr.left), formal_conjugate(expr.right))
    if isinstance(expr, Sub):
        return Sub(formal_conjugate(expr.left), formal_conjugate(expr.right))
    if isinstance(expr, Mul):
        return Mul(formal_conjugate(expr.left), formal_conjugate(expr.right))
    if isinstance(expr, Div):
        return Div(formal_conjugate(expr.left), formal_conjugate(expr.right))
    if isinstance(expr, Neg):
        return Neg(formal_conjugate(expr.arg))
    if isinstance(expr, Pow):
        return Pow(formal_conjugate(expr.base), expr.exponent)
    if isinstance(expr, Log):
        return Log(formal_conjugate(expr.arg))
    if isinstance(expr, Exp):
        return Exp(formal_conjugate(expr.arg))
    raise TypeError(f"not an expression node: {expr!r}")
