"""Univariate expression trees: parsing, evaluation and symbolic derivatives.

Grammar (lowest to highest precedence)::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right-associative
    atom    := number | 'x' | 'pi' | 'e' | func '(' sum ')' | '(' sum ')'

Implicit multiplication is rejected. Evaluation is vectorized over numpy
arrays and raises :class:`DomainError` instead of returning NaN/inf.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

FUNCTIONS = ("sin", "cos", "exp", "ln", "sinh", "cosh", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}
BINARY_OPS = ("+", "-", "*", "/", "^")


class ExprError(ValueError):
    pass


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifierError(ParseError):
    pass


class DomainError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Num:
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v < 0:
            # negative literals are written as Neg(Num(...)) so that printing round-trips
            raise ExprError(f"numeric literal must be finite and non-negative, got {self.value!r}")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Const:
    name: str

    def __post_init__(self):
        if self.name not in CONSTANTS:
            raise ExprError(f"unknown constant {self.name!r}")


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ExprError(f"unknown operator {self.op!r}")


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ExprError(f"unknown function {self.name!r}")


Expr = Union[Num, Var, Const, Neg, BinOp, Call]

X = Var()


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(src: str):
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.end() == pos:
            start = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ParseError(f"unexpected character {src[start]!r}", start)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, val, pos = self.take()
        if val != text:
            raise ParseError(f"expected {text!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Expr:
        node = self.sum()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected token {val!r} (implicit multiplication is not allowed)", pos)
        return node

    def sum(self) -> Expr:
        node = self.product()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.product())
        return node

    def product(self) -> Expr:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "ident":
            if val == "x":
                return X
            if val in CONSTANTS:
                return Const(val)
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.sum()
                self.expect(")")
                return Call(val, arg)
            raise UnknownIdentifierError(f"unknown identifier {val!r}", pos)
        if val == "(":
            node = self.sum()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)


def parse(src: str) -> Expr:
    if not src or not src.strip():
        raise ParseError("empty expression", 0)
    return _Parser(src).parse()


def serialize(e: Expr) -> str:
    """Fully parenthesized text form; ``parse(serialize(e)) == e``."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Neg):
        return f"(-{serialize(e.operand)})"
    if isinstance(e, BinOp):
        return f"({serialize(e.left)} {e.op} {serialize(e.right)})"
    if isinstance(e, Call):
        return f"{e.name}({serialize(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# evaluation


def is_constant(e: Expr) -> bool:
    if isinstance(e, Var):
        return False
    if isinstance(e, (Num, Const)):
        return True
    if isinstance(e, Neg):
        return is_constant(e.operand)
    if isinstance(e, BinOp):
        return is_constant(e.left) and is_constant(e.right)
    return is_constant(e.arg)


def _check(v, what):
    if not np.all(np.isfinite(v)):
        raise DomainError(f"non-finite result in {what}")
    return v


def _integral_exponent(e: Expr):
    """Return the exponent as an int when it is a constant integer, else None."""
    if not is_constant(e):
        return None
    v = float(_eval(e, np.float64(0.0)))
    if v == int(v) and abs(v) < 2**31:
        return int(v)
    return None


def _eval(e: Expr, x):
    if isinstance(e, Num):
        return np.full_like(x, e.value) if np.ndim(x) else np.float64(e.value)
    if isinstance(e, Var):
        return x
    if isinstance(e, Const):
        return np.full_like(x, CONSTANTS[e.name]) if np.ndim(x) else np.float64(CONSTANTS[e.name])
    if isinstance(e, Neg):
        return -_eval(e.operand, x)
    if isinstance(e, BinOp):
        a = _eval(e.left, x)
        if e.op == "^":
            k = _integral_exponent(e.right)
            if k is not None:
                if k < 0 and np.any(a == 0):
                    raise DomainError("zero raised to a negative power")
                return _check(np.power(a, float(k)), "power")
            b = _eval(e.right, x)
            if np.any(a <= 0):
                raise DomainError("non-integer power of a non-positive base")
            return _check(np.exp(b * np.log(a)), "power")
        b = _eval(e.right, x)
        if e.op == "+":
            return _check(a + b, "addition")
        if e.op == "-":
            return _check(a - b, "subtraction")
        if e.op == "*":
            return _check(a * b, "multiplication")
        if np.any(b == 0):
            raise DomainError("division by zero")
        return _check(a / b, "division")
    a = _eval(e.arg, x)
    name = e.name
    if name == "ln":
        if np.any(a <= 0):
            raise DomainError("ln of a non-positive number")
        return np.log(a)
    if name == "sqrt":
        if np.any(a < 0):
            raise DomainError("sqrt of a negative number")
        return np.sqrt(a)
    fn = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sinh": np.sinh, "cosh": np.cosh}[name]
    return _check(fn(a), name)


def evaluate(e: Expr, x):
    """Evaluate ``e`` at a scalar or array ``x``; raises DomainError on any invalid point."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("evaluation point is not finite")
    with np.errstate(all="ignore"):
        out = _eval(e, arr)
    out = np.asarray(out, dtype=float)
    if out.shape != arr.shape:
        out = np.broadcast_to(out, arr.shape).copy()
    if arr.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# differentiation


def _num(v: float) -> Expr:
    return Num(v) if v >= 0 else Neg(Num(-v))


def differentiate(e: Expr) -> Expr:
    """Symbolic derivative with respect to x. No simplification beyond constants."""
    if isinstance(e, (Num, Const)):
        return Num(0.0)
    if isinstance(e, Var):
        return Num(1.0)
    if isinstance(e, Neg):
        return Neg(differentiate(e.operand))
    if isinstance(e, BinOp):
        a, b = e.left, e.right
        da = differentiate(a)
        if e.op in ("+", "-"):
            return BinOp(e.op, da, differentiate(b))
        if e.op == "*":
            return BinOp("+", BinOp("*", da, b), BinOp("*", a, differentiate(b)))
        if e.op == "/":
            num = BinOp("-", BinOp("*", da, b), BinOp("*", a, differentiate(b)))
            return BinOp("/", num, BinOp("^", b, Num(2.0)))
        # power
        if is_constant(b):
            k = _integral_exponent(b)
            if k is not None:
                if k == 0:
                    return Num(0.0)
                return BinOp("*", BinOp("*", _num(float(k)), BinOp("^", a, _num(float(k - 1)))), da)
            return BinOp("*", BinOp("*", b, BinOp("^", a, BinOp("-", b, Num(1.0)))), da)
        # d(a^b) = a^b * (b' ln a + b a'/a)
        inner = BinOp("+", BinOp("*", differentiate(b), Call("ln", a)), BinOp("/", BinOp("*", b, da), a))
        return BinOp("*", e, inner)
    a = e.arg
    da = differentiate(a)
    name = e.name
    if name == "sin":
        outer = Call("cos", a)
    elif name == "cos":
        outer = Neg(Call("sin", a))
    elif name == "exp":
        outer = e
    elif name == "ln":
        return BinOp("/", da, a)
    elif name == "sinh":
        outer = Call("cosh", a)
    elif name == "cosh":
        outer = Call("sinh", a)
    else:  # sqrt
        return BinOp("/", da, BinOp("*", Num(2.0), e))
    return BinOp("*", outer, da)


def as_expr(src) -> Expr:
    if isinstance(src, str):
        return parse(src)
    if isinstance(src, (Num, Var, Const, Neg, BinOp, Call)):
        return src
    raise TypeError(f"expected expression text or Expr, got {type(src).__name__}")
