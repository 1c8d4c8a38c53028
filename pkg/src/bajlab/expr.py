"""One-variable expression trees with second-order forward-mode evaluation.

The grammar (left-associative + - * /, right-associative ^, standard
precedence):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := unary ('^' factor)?
    unary  := '-'? atom
    atom   := number | 'x' | 'pi' | 'e' | ident '(' expr ')' | '(' expr ')'

Note the grammar puts the unary minus inside the power base, so "-x^2"
parses as (-x)^2.

Evaluation propagates (value, first, second derivative) triples, seeded
with (x, 1, 0), so every downstream Wronskian computation gets exact
derivatives rather than finite differences.  All evaluators accept a float
or a numpy array for `x` and vectorize elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ExprSyntaxError, UnknownIdentifierError

Scalar = Union[float, np.ndarray]

# ---------------------------------------------------------------------------
# AST nodes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Const:
    name: str  # "pi" | "e"


@dataclass(frozen=True)
class Neg:
    child: "ExprAst"


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*', '/', '^'
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "ExprAst"


ExprAst = Union[Num, Var, Const, Neg, BinOp, Call]

_CONSTANTS = {"pi": math.pi, "e": math.e}

FUNCTIONS = (
    "sin", "cos", "tan", "sinh", "cosh", "tanh",
    "exp", "ln", "sqrt", "atan", "atanh", "asin", "abs",
)


# Builders for programmatic construction (normalized so that trees
# round-trip through to_source/parse: literals are nonnegative).

def num(value: float) -> ExprAst:
    v = float(value)
    return Neg(Num(-v)) if v < 0 else Num(v)


def var() -> ExprAst:
    return Var()


def call(fn: str, arg: ExprAst) -> ExprAst:
    if fn not in FUNCTIONS:
        raise ValueError(f"unknown function {fn!r}")
    return Call(fn, arg)


def add(a: ExprAst, b: ExprAst) -> ExprAst:
    return BinOp("+", a, b)


def sub(a: ExprAst, b: ExprAst) -> ExprAst:
    return BinOp("-", a, b)


def mul(a: ExprAst, b: ExprAst) -> ExprAst:
    return BinOp("*", a, b)


def div(a: ExprAst, b: ExprAst) -> ExprAst:
    return BinOp("/", a, b)


def pow_(a: ExprAst, b: ExprAst) -> ExprAst:
    return BinOp("^", a, b)


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_OPS = set("+-*/^()")


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    """Returns (kind, text, position) triples; kinds: num, ident, op, end."""
    tokens = []
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPS:
            tokens.append(("op", c, i))
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            # exponent suffix only when it is a complete [eE][+-]?digits
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    while k < n and source[k].isdigit():
                        k += 1
                    j = k
            tokens.append(("num", source[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(("ident", source[i:j], i))
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", i, source)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok=None, cls=ExprSyntaxError):
        tok = tok or self.peek()
        raise cls(message, tok[2], self.source)

    def parse(self) -> ExprAst:
        node = self.expr()
        kind, text, _ = self.peek()
        if kind != "end":
            self.error(f"unexpected {text!r} after expression")
        return node

    def expr(self) -> ExprAst:
        node = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> ExprAst:
        node = self.factor()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.advance()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> ExprAst:
        base = self.unary()
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def unary(self) -> ExprAst:
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            return Neg(self.atom())
        return self.atom()

    def atom(self) -> ExprAst:
        kind, text, pos = self.peek()
        if kind == "num":
            self.advance()
            return Num(float(text))
        if kind == "ident":
            self.advance()
            if self.peek()[:2] == ("op", "("):
                if text not in FUNCTIONS:
                    raise UnknownIdentifierError(
                        f"unknown function {text!r}", pos, self.source)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text == "x":
                return Var()
            if text in _CONSTANTS:
                return Const(text)
            raise UnknownIdentifierError(
                f"unknown identifier {text!r} (only the variable 'x' is allowed)",
                pos, self.source)
        if kind == "op" and text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.error(f"expected a value, got {text!r}" if text else "unexpected end of input")

    def expect(self, op: str):
        kind, text, _ = self.peek()
        if kind == "op" and text == op:
            self.advance()
            return
        self.error(f"expected {op!r}, got {text!r}" if text else f"expected {op!r}")


def parse(source: str) -> ExprAst:
    """Parses a one-variable expression; raises ExprSyntaxError on bad input."""
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0, source)
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# Pretty-printing (inverse of parse up to tree structure)
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}


def _prec(node: ExprAst) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3  # behaves like a power base: unary := '-'? atom
    return 9


def to_source(node: ExprAst) -> str:
    """Renders the tree as parseable text; parse(to_source(t)) == t."""
    if isinstance(node, Num):
        return format(node.value, ".17g")
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Neg):
        inner = to_source(node.child)
        if isinstance(node.child, (Num, Var, Const, Call)):
            return "-" + inner
        return "-(" + inner + ")"
    if isinstance(node, Call):
        return f"{node.fn}({to_source(node.arg)})"
    if isinstance(node, BinOp):
        op = node.op
        lp, rp = to_source(node.left), to_source(node.right)
        if op == "^":
            # base must be a unary/atom; exponent may be another factor
            if not isinstance(node.left, (Num, Var, Const, Call, Neg)):
                lp = "(" + lp + ")"
            if isinstance(node.right, BinOp) and node.right.op != "^":
                rp = "(" + rp + ")"
            return f"{lp}^{rp}"
        if _prec(node.left) < _PREC[op]:
            lp = "(" + lp + ")"
        # left-associative: parenthesize right operand of equal precedence
        if _prec(node.right) <= _PREC[op]:
            rp = "(" + rp + ")"
        if isinstance(node.right, Neg):
            rp = "(" + to_source(node.right) + ")"
        return f"{lp} {op} {rp}"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Second-order dual numbers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualValue:
    """(value, first derivative, second derivative) triple.

    Components are floats or equally-shaped numpy arrays; arithmetic obeys
    the product/quotient/chain rules to second order.
    """

    v0: Scalar
    v1: Scalar
    v2: Scalar

    def __add__(self, other: "DualValue") -> "DualValue":
        return DualValue(self.v0 + other.v0, self.v1 + other.v1, self.v2 + other.v2)

    def __sub__(self, other: "DualValue") -> "DualValue":
        return DualValue(self.v0 - other.v0, self.v1 - other.v1, self.v2 - other.v2)

    def __neg__(self) -> "DualValue":
        return DualValue(-self.v0, -self.v1, -self.v2)

    def __mul__(self, other: "DualValue") -> "DualValue":
        return DualValue(
            self.v0 * other.v0,
            self.v1 * other.v0 + self.v0 * other.v1,
            self.v2 * other.v0 + 2.0 * self.v1 * other.v1 + self.v0 * other.v2,
        )

    def __truediv__(self, other: "DualValue") -> "DualValue":
        q0 = self.v0 / other.v0
        q1 = (self.v1 - q0 * other.v1) / other.v0
        q2 = (self.v2 - 2.0 * q1 * other.v1 - q0 * other.v2) / other.v0
        return DualValue(q0, q1, q2)

    def chain(self, h0: Scalar, h1: Scalar, h2: Scalar) -> "DualValue":
        """Composes an outer map given its value/1st/2nd derivative at v0."""
        return DualValue(h0, h1 * self.v1, h2 * self.v1 * self.v1 + h1 * self.v2)


def dual_constant(value: Scalar) -> DualValue:
    z = np.zeros_like(np.asarray(value, dtype=float)) if isinstance(value, np.ndarray) else 0.0
    return DualValue(value, z, z)


def dual_seed(x: Scalar) -> DualValue:
    """The evaluation seed (x, 1, 0)."""
    if isinstance(x, np.ndarray):
        return DualValue(x.astype(float), np.ones_like(x, dtype=float), np.zeros_like(x, dtype=float))
    return DualValue(float(x), 1.0, 0.0)


def _int_pow(base: DualValue, k: int) -> DualValue:
    # repeated multiplication keeps negative bases exact and avoids log()
    if k == 0:
        return dual_constant(np.ones_like(base.v0) if isinstance(base.v0, np.ndarray) else 1.0)
    if k < 0:
        return dual_constant(1.0 if not isinstance(base.v0, np.ndarray) else np.ones_like(base.v0)) / _int_pow(base, -k)
    result = base
    for _ in range(k - 1):
        result = result * base
    return result


def _check(bad, message: str, node: ExprAst, x: Scalar):
    if np.any(bad):
        if isinstance(x, np.ndarray):
            at = float(np.asarray(x)[np.argmax(np.asarray(bad))])
        else:
            at = float(x)
        raise DomainError(message, to_source(node), at)


def _apply_fn(node: Call, u: DualValue, x: Scalar) -> DualValue:
    v = u.v0
    fn = node.fn
    if fn == "sin":
        s, c = np.sin(v), np.cos(v)
        return u.chain(s, c, -s)
    if fn == "cos":
        s, c = np.sin(v), np.cos(v)
        return u.chain(c, -s, -c)
    if fn == "tan":
        t = np.tan(v)
        sec2 = 1.0 + t * t
        return u.chain(t, sec2, 2.0 * t * sec2)
    if fn == "sinh":
        return u.chain(np.sinh(v), np.cosh(v), np.sinh(v))
    if fn == "cosh":
        return u.chain(np.cosh(v), np.sinh(v), np.cosh(v))
    if fn == "tanh":
        t = np.tanh(v)
        d = 1.0 - t * t
        return u.chain(t, d, -2.0 * t * d)
    if fn == "exp":
        e = np.exp(v)
        return u.chain(e, e, e)
    if fn == "ln":
        _check(v <= 0.0, "ln of non-positive value", node, x)
        return u.chain(np.log(v), 1.0 / v, -1.0 / (v * v))
    if fn == "sqrt":
        _check(v < 0.0, "sqrt of negative value", node, x)
        _check(v == 0.0, "derivative of sqrt at zero", node, x)
        r = np.sqrt(v)
        return u.chain(r, 0.5 / r, -0.25 / (v * r))
    if fn == "atan":
        d = 1.0 / (1.0 + v * v)
        return u.chain(np.arctan(v), d, -2.0 * v * d * d)
    if fn == "atanh":
        _check(np.abs(v) >= 1.0, "atanh outside (-1, 1)", node, x)
        d = 1.0 / (1.0 - v * v)
        return u.chain(np.arctanh(v), d, 2.0 * v * d * d)
    if fn == "asin":
        _check(np.abs(v) >= 1.0, "asin outside (-1, 1)", node, x)
        d = 1.0 / np.sqrt(1.0 - v * v)
        return u.chain(np.arcsin(v), d, v * d * d * d)
    if fn == "abs":
        s = np.sign(v)
        return u.chain(np.abs(v), s, 0.0 * s)
    raise ValueError(f"unknown function {fn!r}")


def _is_constant(node: ExprAst) -> bool:
    if isinstance(node, (Num, Const)):
        return True
    if isinstance(node, Var):
        return False
    if isinstance(node, Neg):
        return _is_constant(node.child)
    if isinstance(node, BinOp):
        return _is_constant(node.left) and _is_constant(node.right)
    if isinstance(node, Call):
        return _is_constant(node.arg)
    raise TypeError(f"not an expression node: {node!r}")


def _eval(node: ExprAst, x: Scalar, seed: DualValue) -> DualValue:
    if isinstance(node, Num):
        return dual_constant(node.value)
    if isinstance(node, Const):
        return dual_constant(_CONSTANTS[node.name])
    if isinstance(node, Var):
        return seed
    if isinstance(node, Neg):
        return -_eval(node.child, x, seed)
    if isinstance(node, Call):
        return _apply_fn(node, _eval(node.arg, x, seed), x)
    if isinstance(node, BinOp):
        if node.op == "^":
            return _eval_pow(node, x, seed)
        a = _eval(node.left, x, seed)
        b = _eval(node.right, x, seed)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            _check(b.v0 == 0.0, "division by zero", node, x)
            return a / b
    raise TypeError(f"not an expression node: {node!r}")


def _eval_pow(node: BinOp, x: Scalar, seed: DualValue) -> DualValue:
    base = _eval(node.left, x, seed)
    if _is_constant(node.right):
        k = float(_eval(node.right, 0.0, dual_seed(0.0)).v0)
        if k == round(k) and abs(k) <= 1_000_000:
            ki = int(round(k))
            if ki < 0:
                _check(base.v0 == 0.0, "zero raised to a negative power", node, x)
            return _int_pow(base, ki)
        _check(base.v0 <= 0.0, "non-integer power of non-positive base", node, x)
        b = base.v0
        h0 = b ** k
        return base.chain(h0, k * h0 / b, k * (k - 1.0) * h0 / (b * b))
    # variable exponent: f^g = exp(g * ln f), requires positive base
    _check(base.v0 <= 0.0, "variable power of non-positive base", node, x)
    expo = _eval(node.right, x, seed)
    ln_b = base.chain(np.log(base.v0), 1.0 / base.v0, -1.0 / (base.v0 * base.v0))
    prod = expo * ln_b
    e = np.exp(prod.v0)
    return prod.chain(e, e, e)


def _broadcast(value, x: Scalar):
    if isinstance(x, np.ndarray) and not (isinstance(value, np.ndarray) and value.shape == x.shape):
        return np.broadcast_to(np.asarray(value, dtype=float), x.shape).copy()
    return value


def eval_dual(ast: ExprAst, x: Scalar) -> DualValue:
    """Evaluates (f(x), f'(x), f''(x)); raises DomainError off the real domain.

    Constant subtrees are broadcast so the result components always share
    x's shape.
    """
    d = _eval(ast, x, dual_seed(x))
    if isinstance(x, np.ndarray):
        return DualValue(_broadcast(d.v0, x), _broadcast(d.v1, x), _broadcast(d.v2, x))
    return d


# Fast value-only walker: ~3x cheaper than the dual path, used in the inner
# loops of the monotone inversion.


def _eval_value(node: ExprAst, x: Scalar) -> Scalar:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return _CONSTANTS[node.name]
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval_value(node.child, x)
    if isinstance(node, Call):
        v = _eval_value(node.arg, x)
        fn = node.fn
        if fn == "ln":
            _check(v <= 0.0, "ln of non-positive value", node, x)
            return np.log(v)
        if fn == "sqrt":
            _check(v < 0.0, "sqrt of negative value", node, x)
            return np.sqrt(v)
        if fn == "atanh":
            _check(np.abs(v) >= 1.0, "atanh outside (-1, 1)", node, x)
            return np.arctanh(v)
        if fn == "asin":
            _check(np.abs(v) > 1.0, "asin outside [-1, 1]", node, x)
            return np.arcsin(v)
        return _VALUE_FNS[fn](v)
    if isinstance(node, BinOp):
        a = _eval_value(node.left, x)
        if node.op == "^":
            if _is_constant(node.right):
                k = float(_eval_value(node.right, 0.0))
                if k == round(k) and abs(k) <= 1_000_000:
                    ki = int(round(k))
                    if ki < 0:
                        _check(np.asarray(a) == 0.0, "zero raised to a negative power", node, x)
                    return np.asarray(a, dtype=float) ** ki if isinstance(a, np.ndarray) else float(a) ** ki
                _check(np.asarray(a) <= 0.0, "non-integer power of non-positive base", node, x)
                return a ** k
            b = _eval_value(node.right, x)
            _check(np.asarray(a) <= 0.0, "variable power of non-positive base", node, x)
            return np.exp(b * np.log(a))
        b = _eval_value(node.right, x)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        _check(np.asarray(b) == 0.0, "division by zero", node, x)
        return a / b
    raise TypeError(f"not an expression node: {node!r}")


_VALUE_FNS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan,
    "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh,
    "exp": np.exp, "abs": np.abs, "atan": np.arctan,
}


def eval_value(ast: ExprAst, x: Scalar) -> Scalar:
    """Evaluates f(x) only (no derivatives); result shape follows x."""
    return _broadcast(_eval_value(ast, x), x)
