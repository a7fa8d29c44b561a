"""Order-preserving arithmetic expressions over lagged NARMAX variables.

An expression is parsed into an immutable AST that keeps every parenthesis
and precedence decision of the source text.  Two ASTs that are algebraically
equal but differ in shape are different *extensions*: evaluating them in
binary64 may round differently, and that difference is what the rest of the
package measures.

Grammar (whitespace is ignored)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" INTEGER)*
    atom    := NUMBER | var | func "(" expr ")" | "(" expr ")"
    var     := ("y" | "u") "(" "n" [("-" | "+") INTEGER] ")"
    func    := "sin" | "cos"
    NUMBER  := digits ["." digits] [("e" | "E") ["+" | "-"] digits]
             | "." digits [exponent]

``y`` lags must be at least 1 and ``u`` lags at least 0.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Union

__all__ = [
    "Constant",
    "Variable",
    "BinaryOp",
    "UnaryNeg",
    "Call",
    "Expression",
    "CanonicalPolynomial",
    "ExpressionSyntaxError",
    "EvaluationError",
    "UnsupportedFormError",
    "parse_expression",
    "format_expression",
    "compile_expression",
    "evaluate_strict",
    "expand_canonical",
    "check_equivalence",
    "variables",
    "max_lags",
    "POW_MODES",
]

POW_MODES = ("libm", "repeated")


class ExpressionSyntaxError(ValueError):
    """Raised when expression text does not match the grammar."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class EvaluationError(ArithmeticError):
    pass


class UnsupportedFormError(ValueError):
    """Raised when a non-polynomial node reaches the canonical expander."""


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    """Decimal literal, kept as its source text so it can be read exactly."""

    text: str

    @property
    def value(self) -> float:
        return float(self.text)

    @property
    def exact(self) -> Fraction:
        return Fraction(self.text)


@dataclass(frozen=True)
class Variable:
    stream: str
    lag: int

    def __post_init__(self):
        if self.stream not in ("y", "u"):
            raise ValueError(f"unknown stream {self.stream!r}")
        if self.stream == "y" and self.lag < 1:
            raise ValueError("output lags must be >= 1")
        if self.lag < 0:
            raise ValueError("input lags must be >= 0")

    @property
    def key(self) -> tuple[str, int]:
        return (self.stream, self.lag)


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: "Expression"
    right: "Expression"

    def __post_init__(self):
        if self.op not in ("+", "-", "*", "/", "^"):
            raise ValueError(f"unknown operator {self.op!r}")
        if self.op == "^":
            r = self.right
            if not (isinstance(r, Constant) and r.text.isdigit()):
                raise ValueError("exponent must be a nonnegative integer literal")


@dataclass(frozen=True)
class UnaryNeg:
    child: "Expression"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expression"

    def __post_init__(self):
        if self.fn not in ("sin", "cos"):
            raise ValueError(f"unknown function {self.fn!r}")


Expression = Union[Constant, Variable, BinaryOp, UnaryNeg, Call]


def variables(e: Expression) -> set[tuple[str, int]]:
    """Return the set of ``(stream, lag)`` keys referenced by ``e``."""
    out: set[tuple[str, int]] = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Variable):
            out.add(node.key)
        elif isinstance(node, BinaryOp):
            stack.extend((node.left, node.right))
        elif isinstance(node, UnaryNeg):
            stack.append(node.child)
        elif isinstance(node, Call):
            stack.append(node.arg)
    return out


def max_lags(e: Expression) -> tuple[int, int]:
    """Largest ``y`` lag and largest ``u`` lag in ``e`` (0 when absent)."""
    ny = nu = 0
    for stream, lag in variables(e):
        if stream == "y":
            ny = max(ny, lag)
        else:
            nu = max(nu, lag)
    return ny, nu


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(text):
    tokens = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        while text[pos].isspace():
            pos += 1
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", end))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.advance()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ExpressionSyntaxError(f"expected {value!r}, found {found}", pos)

    def parse(self):
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected token {text!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinaryOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinaryOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            return UnaryNeg(self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        while self.peek()[:2] == ("op", "^"):
            self.advance()
            kind, text, pos = self.advance()
            if kind == "op" and text == "-":
                raise ExpressionSyntaxError("negative exponent", pos)
            if kind != "num" or not text.isdigit():
                raise ExpressionSyntaxError(
                    f"exponent must be a nonnegative integer, found {text!r}", pos
                )
            node = BinaryOp("^", node, Constant(text))
        return node

    def atom(self):
        kind, text, pos = self.advance()
        if kind == "num":
            return Constant(text)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if text in ("sin", "cos"):
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in ("y", "u"):
                return self.variable(text, pos)
            raise ExpressionSyntaxError(f"unknown name {text!r}", pos)
        found = "end of input" if kind == "end" else repr(text)
        raise ExpressionSyntaxError(f"unexpected {found}", pos)

    def variable(self, stream, pos):
        self.expect("(")
        kind, text, npos = self.advance()
        if (kind, text) != ("name", "n"):
            raise ExpressionSyntaxError("expected time index 'n'", npos)
        lag = 0
        kind, text, spos = self.peek()
        if kind == "op" and text in ("-", "+"):
            self.advance()
            nkind, ntext, lpos = self.advance()
            if nkind != "num" or not ntext.isdigit():
                raise ExpressionSyntaxError("lag must be an integer", lpos)
            lag = int(ntext) if text == "-" else -int(ntext)
        self.expect(")")
        if stream == "y" and lag < 1:
            raise ExpressionSyntaxError(f"output lag must be >= 1, got {lag}", pos)
        if lag < 0:
            raise ExpressionSyntaxError("input lag must be >= 0", pos)
        return Variable(stream, lag)


def parse_expression(text: str) -> Expression:
    """Parse ``text`` into an AST without any simplification or reordering.

    Raises
    ------
    ExpressionSyntaxError
        On malformed text, non-integer or negative exponents, or ``y(n)``.
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 5


def _prec(e):
    if isinstance(e, BinaryOp):
        return _PREC[e.op]
    if isinstance(e, UnaryNeg):
        return _NEG_PREC
    return _ATOM_PREC


def _wrap(s, cond):
    return f"({s})" if cond else s


def format_expression(e: Expression) -> str:
    """Render ``e`` with the minimum parentheses that preserve its shape."""
    if isinstance(e, Constant):
        return e.text
    if isinstance(e, Variable):
        return f"{e.stream}(n)" if e.lag == 0 else f"{e.stream}(n-{e.lag})"
    if isinstance(e, Call):
        return f"{e.fn}({format_expression(e.arg)})"
    if isinstance(e, UnaryNeg):
        child = format_expression(e.child)
        return "-" + _wrap(child, _prec(e.child) < _NEG_PREC)
    p = _PREC[e.op]
    # left-associative grammar: an equal-precedence right child needs parentheses
    left = _wrap(format_expression(e.left), _prec(e.left) < p)
    right = _wrap(format_expression(e.right), _prec(e.right) <= p)
    if e.op in ("+", "-"):
        return f"{left} {e.op} {right}"
    return f"{left}{e.op}{right}"


# ---------------------------------------------------------------------------
# Strict binary64 evaluation
# ---------------------------------------------------------------------------


def _libm_pow(x, k):
    try:
        return math.pow(x, k)
    except OverflowError:
        return math.copysign(math.inf, x) if int(k) % 2 else math.inf
    except ValueError:
        return math.nan


def _repeated_pow(x, k):
    if k == 0:
        return 1.0
    acc = x
    for _ in range(k - 1):
        acc = acc * x
    return acc


def _safe_call(fn):
    def call(x):
        try:
            return fn(x)
        except ValueError:
            return math.nan

    return call


def _compile(e, pow_mode):
    # Each node becomes a closure; Python floats are IEEE binary64 and the
    # interpreter never reassociates or contracts into FMA.
    if isinstance(e, Constant):
        v = e.value
        return lambda env: v
    if isinstance(e, Variable):
        key = e.key
        return lambda env: env[key]
    if isinstance(e, UnaryNeg):
        c = _compile(e.child, pow_mode)
        return lambda env: -c(env)
    if isinstance(e, Call):
        a = _compile(e.arg, pow_mode)
        fn = _safe_call(math.sin if e.fn == "sin" else math.cos)
        return lambda env: fn(a(env))
    left = _compile(e.left, pow_mode)
    if e.op == "^":
        k = int(e.right.text)
        if pow_mode == "libm":
            kf = float(k)
            return lambda env: _libm_pow(left(env), kf)
        return lambda env: _repeated_pow(left(env), k)
    right = _compile(e.right, pow_mode)
    if e.op == "+":
        return lambda env: left(env) + right(env)
    if e.op == "-":
        return lambda env: left(env) - right(env)
    if e.op == "*":
        return lambda env: left(env) * right(env)

    def divide(env):
        num, den = left(env), right(env)
        if den == 0.0:
            raise EvaluationError("division by zero")
        return num / den

    return divide


def compile_expression(
    e: Expression, pow_mode: str = "libm"
) -> Callable[[Mapping[tuple[str, int], float]], float]:
    """Build a callable that evaluates ``e`` in strict AST order.

    The returned function takes a mapping from ``(stream, lag)`` to float.
    """
    if pow_mode not in POW_MODES:
        raise ValueError(f"pow_mode must be one of {POW_MODES}, got {pow_mode!r}")
    return _compile(e, pow_mode)


def evaluate_strict(
    e: Expression,
    env: Mapping[tuple[str, int], float],
    pow_mode: str = "libm",
) -> float:
    """Evaluate ``e`` in binary64, applying operations exactly in AST order.

    ``x^k`` goes through the C library ``pow`` with a floating exponent when
    ``pow_mode="libm"``, and through left-associated multiplication when
    ``pow_mode="repeated"``.  Overflow yields ``inf`` and invalid operations
    yield ``nan``; callers treat non-finite results as divergence.

    Raises
    ------
    EvaluationError
        On division by zero.
    KeyError
        When ``env`` lacks a variable used in ``e``.
    """
    return compile_expression(e, pow_mode)(env)


# ---------------------------------------------------------------------------
# Exact canonical polynomial form
# ---------------------------------------------------------------------------

Monomial = tuple  # sorted tuple of ((stream, lag), power)


class CanonicalPolynomial:
    """Fully expanded polynomial with exact rational coefficients.

    Terms are stored as ``{monomial: Fraction}`` where a monomial is a sorted
    tuple of ``((stream, lag), power)`` pairs.  Zero coefficients are dropped.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        self._terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def constant(cls, c):
        return cls({(): Fraction(c)})

    @classmethod
    def variable(cls, key):
        return cls({((key, 1),): Fraction(1)})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, CanonicalPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return CanonicalPolynomial(out)

    def __neg__(self):
        return CanonicalPolynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return CanonicalPolynomial(out)

    def __pow__(self, k):
        acc = CanonicalPolynomial.constant(1)
        for _ in range(k):
            acc = acc * self
        return acc

    def __repr__(self):
        return f"CanonicalPolynomial({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=lambda m: (_mono_degree(m), m)):
            factors = [
                (f"{s}(n)" if lag == 0 else f"{s}(n-{lag})") + (f"^{p}" if p > 1 else "")
                for (s, lag), p in m
            ]
            parts.append("*".join([str(self._terms[m])] + factors))
        return " + ".join(parts)


def _mono_mul(m1, m2):
    powers = dict(m1)
    for key, p in m2:
        powers[key] = powers.get(key, 0) + p
    return tuple(sorted(powers.items()))


def _mono_degree(m):
    return sum(p for _, p in m)


def expand_canonical(e: Expression) -> CanonicalPolynomial:
    """Expand ``e`` to a :class:`CanonicalPolynomial` using exact rationals.

    Constants are read from their decimal text, so ``2.6868`` becomes
    ``Fraction(26868, 10000)`` rather than its binary64 neighbour.

    Raises
    ------
    UnsupportedFormError
        If ``e`` contains division or a function call.
    """
    if isinstance(e, Constant):
        return CanonicalPolynomial.constant(e.exact)
    if isinstance(e, Variable):
        return CanonicalPolynomial.variable(e.key)
    if isinstance(e, UnaryNeg):
        return -expand_canonical(e.child)
    if isinstance(e, Call):
        raise UnsupportedFormError(f"{e.fn}() is outside the polynomial subset")
    if e.op == "/":
        raise UnsupportedFormError("division is outside the polynomial subset")
    left = expand_canonical(e.left)
    if e.op == "^":
        return left ** int(e.right.text)
    right = expand_canonical(e.right)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    return left * right


def check_equivalence(a: Expression, b: Expression) -> bool:
    """True when ``a`` and ``b`` expand to the same exact polynomial."""
    return expand_canonical(a) == expand_canonical(b)
