"""Expression language over one variable ``x``.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = ("-" | "+") unary | power ;
    power   = primary [ "^" unary ] ;
    primary = number | "x" | "pi" | "e" | func "(" expr ")" | "(" expr ")" ;
    func    = "exp" | "ln" | "sqrt" | "atan" | "sin" | "cos" | "abs" ;
    number  = digits [ "." [ digits ] ] [ exponent ] | "." digits [ exponent ] ;

``^`` binds tighter than unary minus (``-x^2 == -(x^2)``) and is
right-associative; the other binary operators are left-associative.

Trees are immutable and callable: ``expr(x)`` evaluates on a float or a
numpy array.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, EvalError, LexError, ParseError

__all__ = [
    "Token",
    "tokenize",
    "parse",
    "parse_expr",
    "Expr",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "evaluate",
    "differentiate",
    "is_constant",
    "Witness",
    "CheckReport",
    "check_positive_decreasing",
    "SCREENING_CAVEAT",
    "FUNCTIONS",
]

FUNCTIONS = ("exp", "ln", "sqrt", "atan", "sin", "cos", "abs")
NAMED_CONSTANTS = {"pi": math.pi, "e": math.e}
MAX_DEPTH = 100

SCREENING_CAVEAT = (
    "sample-based screening on a finite grid; "
    "not a proof of positivity or monotonicity"
)

# ---------------------------------------------------------------------------
# Lexing

_SINGLE = {
    "+": "plus",
    "-": "minus",
    "*": "star",
    "/": "slash",
    "^": "caret",
    "(": "lparen",
    ")": "rparen",
    ",": "comma",
}
_NUMBER = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    position: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch in _SINGLE:
            tokens.append(Token(_SINGLE[ch], ch, i))
            i += 1
            continue
        m = _NUMBER.match(source, i)
        if m and ch.isascii():
            lexeme = m.group()
            if not math.isfinite(float(lexeme)):
                raise LexError(f"numeric literal {lexeme!r} overflows", i)
            tokens.append(Token("number", lexeme, i))
            i = m.end()
            continue
        m = _IDENT.match(source, i)
        if m and ch.isascii():
            tokens.append(Token("identifier", m.group(), i))
            i = m.end()
            continue
        raise LexError(f"unexpected character {ch!r}", i)
    return tokens


# ---------------------------------------------------------------------------
# Tree


class Expr:
    """Base class of expression nodes."""

    __slots__ = ()

    def __call__(self, x):
        return evaluate(self, x)

    def __str__(self):
        return _format(self, 0)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise DomainError(f"constant must be finite, got {self.value!r}")


@dataclass(frozen=True, eq=True)
class Var(Expr):
    pass


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    child: Expr


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str  # one of add, sub, mul, div, pow
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Call(Expr):
    # "sign" is produced only by differentiate(abs(u)); the parser never emits it
    name: str
    child: Expr


X = Var()
_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "pow": 4}
_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


def _format(e: Expr, outer: int) -> str:
    if isinstance(e, Const):
        text = repr(float(e.value))
        return f"({text})" if e.value < 0 and outer > 0 else text
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        text = "-" + _format(e.child, 3)
        return f"({text})" if outer >= 3 else text
    if isinstance(e, Call):
        return f"{e.name}({_format(e.child, 0)})"
    prec = _PREC[e.op]
    if e.op == "pow":
        left, right = _format(e.left, prec + 1), _format(e.right, 3)
    else:
        left, right = _format(e.left, prec), _format(e.right, prec + 1)
    text = f"{left} {_SYMBOL[e.op]} {right}"
    return f"({text})" if prec < outer else text


# ---------------------------------------------------------------------------
# Parsing


class _Parser:
    # Each production returns (node, depth) so runaway nesting is caught
    # before evaluation or differentiation would recurse too deeply.

    def __init__(self, tokens, end):
        self.tokens = tokens
        self.i = 0
        self.end = end

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def advance(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, message):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"{message}: unexpected end of input", self.end)
        raise ParseError(f"{message}: unexpected {tok.lexeme!r}", tok.position)

    def expect(self, kind):
        tok = self.peek()
        if tok is None or tok.kind != kind:
            self.fail(f"expected {kind}")
        return self.advance()

    def checked(self, depth):
        if depth > MAX_DEPTH:
            self.fail("expression nested too deeply")
        return depth

    def expr(self, depth=0):
        left, d = self.term(depth)
        while (tok := self.peek()) is not None and tok.kind in ("plus", "minus"):
            self.advance()
            right, dr = self.term(depth)
            left = BinOp("add" if tok.kind == "plus" else "sub", left, right)
            d = self.checked(1 + max(d, dr))
        return left, d

    def term(self, depth):
        left, d = self.unary(depth)
        while (tok := self.peek()) is not None and tok.kind in ("star", "slash"):
            self.advance()
            right, dr = self.unary(depth)
            left = BinOp("mul" if tok.kind == "star" else "div", left, right)
            d = self.checked(1 + max(d, dr))
        return left, d

    def unary(self, depth):
        self.checked(depth)
        tok = self.peek()
        if tok is not None and tok.kind == "minus":
            self.advance()
            child, d = self.unary(depth + 1)
            return Neg(child), self.checked(d + 1)
        if tok is not None and tok.kind == "plus":
            self.advance()
            return self.unary(depth + 1)
        return self.power(depth)

    def power(self, depth):
        base, d = self.primary(depth)
        tok = self.peek()
        if tok is not None and tok.kind == "caret":
            self.advance()
            exponent, de = self.unary(depth + 1)
            return BinOp("pow", base, exponent), self.checked(1 + max(d, de))
        return base, d

    def primary(self, depth):
        tok = self.peek()
        if tok is None:
            self.fail("expected operand")
        if tok.kind == "number":
            self.advance()
            return Const(float(tok.lexeme)), 1
        if tok.kind == "lparen":
            self.advance()
            inner = self.expr(self.checked(depth + 1))
            self.expect("rparen")
            return inner
        if tok.kind == "identifier":
            name = tok.lexeme
            if name == "x":
                self.advance()
                return X, 1
            if name in NAMED_CONSTANTS:
                self.advance()
                return Const(NAMED_CONSTANTS[name]), 1
            if name in FUNCTIONS:
                self.advance()
                self.expect("lparen")
                arg, d = self.expr(self.checked(depth + 1))
                self.expect("rparen")
                return Call(name, arg), self.checked(d + 1)
            raise ParseError(f"unknown identifier {name!r}", tok.position)
        self.fail("expected operand")


def parse(tokens, source_length: Optional[int] = None) -> Expr:
    """Build an ``Expr`` from a token stream produced by :func:`tokenize`."""
    tokens = list(tokens)
    if source_length is None:
        source_length = (tokens[-1].position + len(tokens[-1].lexeme)) if tokens else 0
    parser = _Parser(tokens, source_length)
    tree, _ = parser.expr()
    if parser.peek() is not None:
        parser.fail("expected end of input")
    return tree


def parse_expr(source: str) -> Expr:
    """Tokenize and parse ``source`` in one step."""
    return parse(tokenize(source), len(source))


# ---------------------------------------------------------------------------
# Evaluation

_UFUNCS = {
    "exp": np.exp,
    "ln": np.log,
    "sqrt": np.sqrt,
    "atan": np.arctan,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
    "sign": np.sign,
}
_BINARY = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
    "div": np.divide,
    "pow": np.power,
}


def _ev(e: Expr, x):
    if isinstance(e, Var):
        return x
    if isinstance(e, Const):
        return np.float64(e.value)
    if isinstance(e, BinOp):
        return _BINARY[e.op](_ev(e.left, x), _ev(e.right, x))
    if isinstance(e, Call):
        return _UFUNCS[e.name](_ev(e.child, x))
    if isinstance(e, Neg):
        return np.negative(_ev(e.child, x))
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(f: Expr, x):
    """Evaluate ``f`` at a float or array ``x``.

    Raises :class:`EvalError` on division by zero, logarithm or square root
    outside the real domain, overflow, or any non-finite intermediate.
    Underflow to zero is allowed.
    """
    scalar = np.ndim(x) == 0
    xs = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(xs)):
        raise DomainError("x must be finite")
    try:
        with np.errstate(divide="raise", over="raise", invalid="raise", under="ignore"):
            out = _ev(f, xs)
    except (FloatingPointError, ZeroDivisionError, OverflowError) as exc:
        raise EvalError(f"cannot evaluate {f}: {exc}") from None
    out = np.broadcast_to(out, xs.shape)
    if not np.all(np.isfinite(out)):
        raise EvalError(f"non-finite value of {f}")
    return float(out) if scalar else np.array(out, dtype=np.float64)


# ---------------------------------------------------------------------------
# Differentiation


def is_constant(e: Expr) -> bool:
    if isinstance(e, Var):
        return False
    if isinstance(e, Const):
        return True
    if isinstance(e, BinOp):
        return is_constant(e.left) and is_constant(e.right)
    return is_constant(e.child)


def _is(e, value):
    return isinstance(e, Const) and e.value == value


def _add(a, b):
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    return BinOp("add", a, b)


def _sub(a, b):
    if _is(b, 0):
        return a
    if _is(a, 0):
        return _neg(b)
    return BinOp("sub", a, b)


def _mul(a, b):
    if _is(a, 0) or _is(b, 0):
        return Const(0.0)
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    return BinOp("mul", a, b)


def _div(a, b):
    if _is(a, 0):
        return Const(0.0)
    if _is(b, 1):
        return a
    return BinOp("div", a, b)


def _neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.child
    return Neg(a)


def differentiate(f: Expr) -> Expr:
    """Return an expression for df/dx.

    Only trivial zero/one folding is applied. ``abs(u)`` differentiates to
    ``sign(u) * u'``, i.e. ``u/abs(u)`` away from zero and 0 at ``u == 0``.
    """
    if isinstance(f, Const):
        return Const(0.0)
    if isinstance(f, Var):
        return Const(1.0)
    if isinstance(f, Neg):
        return _neg(differentiate(f.child))
    if isinstance(f, BinOp):
        u, v = f.left, f.right
        du, dv = differentiate(u), differentiate(v)
        if f.op == "add":
            return _add(du, dv)
        if f.op == "sub":
            return _sub(du, dv)
        if f.op == "mul":
            return _add(_mul(du, v), _mul(u, dv))
        if f.op == "div":
            return _div(_sub(_mul(du, v), _mul(u, dv)), BinOp("pow", v, Const(2.0)))
        # pow
        if is_constant(v):
            reduced = BinOp("pow", u, _sub(v, Const(1.0)))
            if isinstance(v, Const):
                reduced = BinOp("pow", u, Const(v.value - 1.0))
            return _mul(_mul(v, reduced), du)
        if is_constant(u):
            return _mul(_mul(Call("ln", u), f), dv)
        return _mul(f, _add(_mul(dv, Call("ln", u)), _div(_mul(v, du), u)))
    if isinstance(f, Call):
        u = f.child
        du = differentiate(u)
        if f.name == "exp":
            outer = f
        elif f.name == "ln":
            return _div(du, u)
        elif f.name == "sqrt":
            return _div(du, _mul(Const(2.0), f))
        elif f.name == "atan":
            return _div(du, _add(Const(1.0), BinOp("pow", u, Const(2.0))))
        elif f.name == "sin":
            outer = Call("cos", u)
        elif f.name == "cos":
            outer = _neg(Call("sin", u))
        elif f.name == "abs":
            outer = Call("sign", u)
        elif f.name == "sign":
            return Const(0.0)
        else:
            raise TypeError(f"unknown function {f.name!r}")
        return _mul(outer, du)
    raise TypeError(f"not an expression node: {f!r}")


# ---------------------------------------------------------------------------
# Hypothesis screening


@dataclass(frozen=True)
class Witness:
    """A sample point that broke a hypothesis.

    ``quantity`` is ``"f"`` when ``value`` is f(x), ``"df"`` when it is f'(x),
    and ``"step"`` when it is f(x) - f(previous sample) (used for callables
    without a symbolic form). ``value`` is NaN when evaluation failed.
    """

    x: float
    value: float
    quantity: str
    message: str = ""


@dataclass(frozen=True)
class CheckReport:
    positive_ok: bool
    decreasing_ok: bool
    samples_used: int
    counterexample: Optional[Witness] = None
    x_min: float = 1.0
    x_max: float = 1.0
    caveat: str = field(default=SCREENING_CAVEAT)

    @property
    def ok(self) -> bool:
        return self.positive_ok and self.decreasing_ok


def _pointwise(func, xs):
    """Evaluate ``func`` at each x, mapping failures to NaN plus a message."""
    try:
        return np.asarray(func(xs), dtype=np.float64), {}
    except EvalError:
        pass
    values = np.empty(len(xs))
    errors = {}
    for i, x in enumerate(xs):
        try:
            values[i] = func(float(x))
        except EvalError as exc:
            values[i] = math.nan
            errors[i] = str(exc)
    return values, errors


def screen_samples(fx, dfx, xs, f_errors=None, df_errors=None, quantity="df") -> CheckReport:
    """Build a CheckReport from sampled values of f and its slope indicator.

    Zero values of f past ``xs[0]`` are accepted as float underflow of a
    positive function; negative values, failures, or f(xs[0]) <= 0 are not.
    """
    f_errors = f_errors or {}
    df_errors = df_errors or {}
    bad_f = np.isnan(fx) | (fx < 0)
    bad_f[0] |= fx[0] <= 0
    witness = None
    positive_ok = not bad_f.any()
    if not positive_ok:
        i = int(np.argmax(bad_f))
        witness = Witness(float(xs[i]), float(fx[i]), "f", f_errors.get(i, ""))
    bad_d = np.isnan(dfx) | (dfx > 1e-12)
    decreasing_ok = not bad_d.any()
    if not decreasing_ok and witness is None:
        i = int(np.argmax(bad_d))
        witness = Witness(float(xs[i]), float(dfx[i]), quantity, df_errors.get(i, ""))
    return CheckReport(positive_ok, decreasing_ok, len(xs), witness,
                       float(xs[0]), float(xs[-1]))


def check_positive_decreasing(f: Expr, x_min: float = 1.0, x_max: float = 1e4,
                              samples: int = 1000) -> CheckReport:
    """Screen ``f > 0`` and ``f' <= 0`` on a uniform grid over [x_min, x_max].

    The derivative test allows ``1e-12`` of roundoff slack. The first failing
    sample (positivity checked before monotonicity) is reported as witness.
    """
    if not (1 <= x_min < x_max) or samples < 2:
        raise DomainError("need 1 <= x_min < x_max and samples >= 2")
    xs = np.linspace(x_min, x_max, int(samples))
    fx, f_err = _pointwise(f, xs)
    dfx, d_err = _pointwise(differentiate(f), xs)
    return screen_samples(fx, dfx, xs, f_err, d_err)
