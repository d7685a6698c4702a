"""Closed-form real expressions: parsing, printing, evaluation, differentiation.

An expression is an immutable tree built from the node classes below.  The
integration variable and the family parameters are plain :class:`Symbol`
nodes; nothing in this module distinguishes between them.

Grammar (``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "pi" | IDENT | IDENT "(" expr ")" | "(" expr ")"
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

__all__ = [
    "Expr", "Constant", "Pi", "Symbol", "Neg", "Add", "Sub", "Mul", "Div",
    "Pow", "Apply", "ParseError", "EvalError", "FUNCTIONS", "SPECIAL_FUNCTIONS",
    "parse", "to_text", "evaluate", "lambdify", "diff", "simplify",
    "free_symbols", "depends_on",
]

Bindings = Mapping[str, float]


class ParseError(ValueError):
    """Syntax error; ``offset`` is the byte offset into the source text."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class EvalError(ArithmeticError):
    """Unbound symbol or a domain fault during evaluation."""


# --------------------------------------------------------------------------
# nodes


class Expr:
    __slots__ = ()

    def __add__(self, other):
        return Add(self, _wrap(other))

    def __radd__(self, other):
        return Add(_wrap(other), self)

    def __sub__(self, other):
        return Sub(self, _wrap(other))

    def __rsub__(self, other):
        return Sub(_wrap(other), self)

    def __mul__(self, other):
        return Mul(self, _wrap(other))

    def __rmul__(self, other):
        return Mul(_wrap(other), self)

    def __truediv__(self, other):
        return Div(self, _wrap(other))

    def __rtruediv__(self, other):
        return Div(_wrap(other), self)

    def __pow__(self, other):
        return Pow(self, _wrap(other))

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return to_text(self)


def _wrap(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Constant(float(value))


@dataclass(frozen=True, eq=True, repr=True)
class Constant(Expr):
    value: float


@dataclass(frozen=True)
class Pi(Expr):
    pass


@dataclass(frozen=True)
class Symbol(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


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
class Pow(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Apply(Expr):
    fn: str
    arg: Expr

    def __post_init__(self):
        if self.fn not in _ALL_FUNCTIONS:
            raise ValueError(f"unknown function {self.fn!r}")


_BINARY = (Add, Sub, Mul, Div, Pow)

# --------------------------------------------------------------------------
# primitive operations shared by the tree walker and the compiler


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _sinh(x: float) -> float:
    try:
        return math.sinh(x)
    except OverflowError:
        return math.copysign(math.inf, x)


def _cosh(x: float) -> float:
    try:
        return math.cosh(x)
    except OverflowError:
        return math.inf


def _pow(x: float, y: float) -> float:
    try:
        return math.pow(x, y)
    except OverflowError:
        if x < 0 and y == int(y) and int(y) % 2 == 1:
            return -math.inf
        return math.inf


def _sign(x: float) -> float:
    if x > 0:
        return 1.0
    if x < 0:
        return -1.0
    return 0.0


def _si(x: float) -> float:
    from . import specfun

    return specfun.si(x)


def _ci(x: float) -> float:
    from . import specfun

    return specfun.ci(x)


FUNCTIONS: dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "atan": math.atan,
    "asin": math.asin,
    "ln": math.log,
    "exp": _exp,
    "sqrt": math.sqrt,
    "sinh": _sinh,
    "cosh": _cosh,
    "abs": math.fabs,
    # needed to close abs under differentiation
    "sign": _sign,
}

# Allowed only in closed forms (parse(..., special=True)).
SPECIAL_FUNCTIONS: dict[str, Callable[[float], float]] = {
    "si": _si,
    "ci": _ci,
}

_ALL_FUNCTIONS = {**FUNCTIONS, **SPECIAL_FUNCTIONS}

_DOMAIN_ERRORS = (ValueError, ZeroDivisionError, OverflowError)

# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos), text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, special: bool):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.functions = _ALL_FUNCTIONS if special else FUNCTIONS

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok):
        raise ParseError(message, _byte_offset(self.text, tok[2]), self.text)

    def expect(self, value):
        tok = self.next()
        if tok[1] != value or tok[0] == "end":
            self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.error(f"unexpected {tok[1]!r}", tok)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.next()[1]
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.next()[1]
            rhs = self.unary()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def unary(self) -> Expr:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.next()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.next()
            return Pow(base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.next()
        kind, value, _ = tok
        if kind == "num":
            return Constant(float(value))
        if kind == "ident":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if value not in self.functions:
                    self.error(f"unknown function {value!r}", tok)
                self.next()
                arg = self.expr()
                self.expect(")")
                return Apply(value, arg)
            if value == "pi":
                return Pi()
            return Symbol(value)
        if kind == "op" and value == "(":
            e = self.expr()
            self.expect(")")
            return e
        self.error(f"unexpected {value or 'end of input'!r}", tok)


def parse(text: str, *, special: bool = False) -> Expr:
    """Parse ``text`` into an expression tree.

    ``special=True`` additionally admits the special functions ``si`` and
    ``ci`` (closed forms only).
    """
    return _Parser(text, special).parse()


# --------------------------------------------------------------------------
# printing

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _prec(e: Expr) -> int:
    if isinstance(e, Constant) and (e.value < 0 or math.copysign(1.0, e.value) < 0):
        return 3
    return _PREC.get(type(e), 5)


def _fmt_number(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == int(v) and abs(v) < 1e15 and math.copysign(1.0, v) > 0:
        return str(int(v))
    return repr(float(v))


def to_text(e: Expr) -> str:
    """Render ``e`` so that ``parse(to_text(e))`` evaluates identically."""
    if isinstance(e, Constant):
        return _fmt_number(e.value)
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Apply):
        return f"{e.fn}({to_text(e.arg)})"
    if isinstance(e, Neg):
        return "-" + _paren(e.arg, _prec(e.arg) < 3)
    p = _PREC[type(e)]
    if isinstance(e, Pow):
        left = _paren(e.left, _prec(e.left) <= p)
        right = _paren(e.right, _prec(e.right) < 3)
        return f"{left}^{right}"
    op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
    left = _paren(e.left, _prec(e.left) < p)
    right = _paren(e.right, _prec(e.right) <= p)
    if p == 1:
        return f"{left} {op} {right}"
    return f"{left}*{right}" if op == "*" else f"{left}/{right}"


def _paren(e: Expr, wrap: bool) -> str:
    text = to_text(e)
    return f"({text})" if wrap else text


# --------------------------------------------------------------------------
# evaluation


def evaluate(e: Expr, bindings: Bindings | None = None) -> float:
    """Evaluate ``e`` in IEEE double precision.

    Raises :class:`EvalError` for unbound symbols, domain faults (log or
    square root of a negative number, division by zero, ...) and NaN results.
    """
    bindings = bindings or {}
    try:
        value = _eval(e, bindings)
    except _DOMAIN_ERRORS as exc:
        raise EvalError(f"domain fault evaluating {to_text(e)}: {exc}") from None
    if value != value:
        raise EvalError(f"NaN result evaluating {to_text(e)}")
    return value


def _eval(e: Expr, b: Bindings) -> float:
    t = type(e)
    if t is Constant:
        return e.value
    if t is Symbol:
        try:
            return float(b[e.name])
        except KeyError:
            raise EvalError(f"unbound symbol {e.name!r}") from None
    if t is Add:
        return _eval(e.left, b) + _eval(e.right, b)
    if t is Sub:
        return _eval(e.left, b) - _eval(e.right, b)
    if t is Mul:
        return _eval(e.left, b) * _eval(e.right, b)
    if t is Div:
        return _eval(e.left, b) / _eval(e.right, b)
    if t is Pow:
        return _pow(_eval(e.left, b), _eval(e.right, b))
    if t is Neg:
        return -_eval(e.arg, b)
    if t is Apply:
        return _ALL_FUNCTIONS[e.fn](_eval(e.arg, b))
    if t is Pi:
        return math.pi
    raise TypeError(f"not an expression node: {e!r}")


def _codegen(e: Expr, args: tuple[str, ...], consts: Bindings) -> str:
    t = type(e)
    if t is Constant:
        return f"({e.value!r})" if math.isfinite(e.value) else f"_F({str(e.value)!r})"
    if t is Pi:
        return "_PI"
    if t is Symbol:
        if e.name in args:
            return f"_a_{e.name}"
        if e.name in consts:
            return repr(float(consts[e.name]))
        raise EvalError(f"unbound symbol {e.name!r}")
    if t is Neg:
        return f"(-{_codegen(e.arg, args, consts)})"
    if t is Apply:
        return f"_fn_{e.fn}({_codegen(e.arg, args, consts)})"
    lhs = _codegen(e.left, args, consts)
    rhs = _codegen(e.right, args, consts)
    if t is Pow:
        return f"_pow({lhs}, {rhs})"
    op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[t]
    return f"({lhs} {op} {rhs})"


def lambdify(e: Expr, args: Iterable[str], constants: Bindings | None = None) -> Callable[..., float]:
    """Compile ``e`` into a Python function of the positional ``args``.

    Symbols not in ``args`` are frozen from ``constants``.  The compiled
    function has the same semantics as :func:`evaluate` (same primitive
    operations, same fault reporting) and is much faster.
    """
    args = tuple(args)
    body = _codegen(e, args, constants or {})
    namespace = {f"_fn_{k}": v for k, v in _ALL_FUNCTIONS.items()}
    namespace.update(_pow=_pow, _PI=math.pi, _F=float)
    params = ", ".join(f"_a_{a}" for a in args)
    src = f"def _inner({params}):\n    return {body}\n"
    exec(compile(src, f"<expr {to_text(e)[:60]}>", "exec"), namespace)
    inner = namespace["_inner"]

    def compiled(*values: float) -> float:
        try:
            value = inner(*values)
        except _DOMAIN_ERRORS as exc:
            raise EvalError(f"domain fault at {values}: {exc}") from None
        if value != value:
            raise EvalError(f"NaN result at {values}")
        return value

    return compiled


# --------------------------------------------------------------------------
# structure


def free_symbols(e: Expr) -> set[str]:
    """Names of all symbols occurring in ``e``."""
    out: set[str] = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Symbol):
            out.add(node.name)
        elif isinstance(node, _BINARY):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, (Neg, Apply)):
            stack.append(node.arg)
    return out


def depends_on(e: Expr, name: str) -> bool:
    return name in free_symbols(e)


# --------------------------------------------------------------------------
# differentiation

ZERO = Constant(0.0)
ONE = Constant(1.0)
TWO = Constant(2.0)


def diff(e: Expr, s: str) -> Expr:
    """Symbolic derivative of ``e`` with respect to the symbol ``s``.

    The result is simplified with the safe local rewrites of :func:`simplify`.
    """
    return simplify(_diff(e, s))


def _diff(e: Expr, s: str) -> Expr:
    if isinstance(e, (Constant, Pi)):
        return ZERO
    if isinstance(e, Symbol):
        return ONE if e.name == s else ZERO
    if not depends_on(e, s):
        return ZERO
    if isinstance(e, Neg):
        return Neg(_diff(e.arg, s))
    if isinstance(e, Add):
        return Add(_diff(e.left, s), _diff(e.right, s))
    if isinstance(e, Sub):
        return Sub(_diff(e.left, s), _diff(e.right, s))
    if isinstance(e, Mul):
        u, v = e.left, e.right
        return Add(Mul(_diff(u, s), v), Mul(u, _diff(v, s)))
    if isinstance(e, Div):
        u, v = e.left, e.right
        if not depends_on(v, s):
            return Div(_diff(u, s), v)
        return Div(Sub(Mul(_diff(u, s), v), Mul(u, _diff(v, s))), Pow(v, TWO))
    if isinstance(e, Pow):
        u, v = e.left, e.right
        if not depends_on(v, s):
            return Mul(Mul(v, Pow(u, Sub(v, ONE))), _diff(u, s))
        if not depends_on(u, s):
            return Mul(Mul(e, Apply("ln", u)), _diff(v, s))
        # u^v * (v' ln u + v u'/u)
        return Mul(e, Add(Mul(_diff(v, s), Apply("ln", u)), Div(Mul(v, _diff(u, s)), u)))
    if isinstance(e, Apply):
        u = e.arg
        if e.fn == "atan":
            return Div(_diff(u, s), Add(ONE, Pow(u, TWO)))
        return Mul(_fn_derivative(e.fn, u), _diff(u, s))
    raise TypeError(f"not an expression node: {e!r}")


def _fn_derivative(fn: str, u: Expr) -> Expr:
    if fn == "sin":
        return Apply("cos", u)
    if fn == "cos":
        return Neg(Apply("sin", u))
    if fn == "tan":
        return Div(ONE, Pow(Apply("cos", u), TWO))
    if fn == "asin":
        return Div(ONE, Apply("sqrt", Sub(ONE, Pow(u, TWO))))
    if fn == "ln":
        return Div(ONE, u)
    if fn == "exp":
        return Apply("exp", u)
    if fn == "sqrt":
        return Div(ONE, Mul(TWO, Apply("sqrt", u)))
    if fn == "sinh":
        return Apply("cosh", u)
    if fn == "cosh":
        return Apply("sinh", u)
    if fn == "abs":
        return Apply("sign", u)
    if fn == "sign":
        return ZERO
    if fn == "si":
        return Div(Apply("sin", u), u)
    if fn == "ci":
        return Div(Apply("cos", u), u)
    raise ValueError(f"no derivative rule for {fn!r}")


# --------------------------------------------------------------------------
# simplification


def simplify(e: Expr) -> Expr:
    """Apply safe local rewrites bottom-up.

    Rewrites: ``0+e``, ``e+0``, ``e-0``, ``1*e``, ``e*1``, ``e/1``, ``e^1`` to
    ``e``; ``0*e`` and ``e*0`` to ``0``; ``--e`` to ``e``; constant subtrees
    are folded when they evaluate to a finite number.  ``pi`` alone is kept
    symbolic.  Idempotent.
    """
    if isinstance(e, (Constant, Pi, Symbol)):
        return e
    if isinstance(e, Neg):
        a = simplify(e.arg)
        if isinstance(a, Neg):
            return a.arg
        if isinstance(a, Constant):
            return Constant(-a.value)
        return Neg(a)
    if isinstance(e, Apply):
        a = simplify(e.arg)
        return _fold(Apply(e.fn, a)) if _is_const(a) else Apply(e.fn, a)
    left = simplify(e.left)
    right = simplify(e.right)
    if isinstance(e, Add):
        if _is_value(left, 0.0):
            return right
        if _is_value(right, 0.0):
            return left
    elif isinstance(e, Sub):
        if _is_value(right, 0.0):
            return left
        if _is_value(left, 0.0):
            return simplify(Neg(right))
    elif isinstance(e, Mul):
        if _is_value(left, 0.0) or _is_value(right, 0.0):
            return ZERO
        if _is_value(left, 1.0):
            return right
        if _is_value(right, 1.0):
            return left
    elif isinstance(e, Div):
        if _is_value(right, 1.0):
            return left
    elif isinstance(e, Pow):
        if _is_value(right, 1.0):
            return left
    node = type(e)(left, right)
    if _is_const(left) and _is_const(right):
        return _fold(node)
    return node


def _is_value(e: Expr, v: float) -> bool:
    return isinstance(e, Constant) and e.value == v


def _is_const(e: Expr) -> bool:
    return isinstance(e, (Constant, Pi))


def _fold(e: Expr) -> Expr:
    try:
        value = evaluate(e)
    except EvalError:
        return e
    if not math.isfinite(value):
        return e
    return Constant(value)
