"""Scalar field expressions over chart coordinates.

Grammar (whitespace insignificant, all binary operators left-associative)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := primary ('^' exponent)*
    exponent := '-'? primary            # must fold to an integer or 0.5
    primary  := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Names are ``x<i>`` (base coordinates), ``y<i>`` (fiber coordinates, only in
tangent-bundle context), the constants ``pi`` and ``e``, and the functions
listed in :data:`FUNCTIONS`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DimensionExceeded, ExprSyntaxError, UnknownIdentifier
from .jets import Jet, Jet3, get_space

FUNCTIONS: dict[str, Callable[[Jet], Jet]] = {
    "sin": Jet.sin,
    "cos": Jet.cos,
    "tan": Jet.tan,
    "exp": Jet.exp,
    "log": Jet.log,
    "sqrt": Jet.sqrt,
    "sinh": Jet.sinh,
    "cosh": Jet.cosh,
    "tanh": Jet.tanh,
    "abs": Jet.abs,
}
CONSTANTS = {"pi": math.pi, "e": math.e}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    fiber: bool
    index: int


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: float


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Pow, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num | name | op | end
    text: str
    pos: int


def _tokenize(source: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(source[pos:]) - len(source[pos:].lstrip()))
            raise ExprSyntaxError(bad, f"unexpected character {source[bad]!r}")
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(source)))
    return toks


class _Parser:
    def __init__(self, source: str, dim: int, allow_fiber_vars: bool):
        self.toks = _tokenize(source)
        self.i = 0
        self.dim = dim
        self.allow_fiber = allow_fiber_vars

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind != "op":
            found = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            raise ExprSyntaxError(self.tok.pos, f"expected {text!r}, found {found}")
        self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise ExprSyntaxError(self.tok.pos, f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        node = self.primary()
        while self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            pos = self.tok.pos
            negate = False
            if self.tok.kind == "op" and self.tok.text == "-":
                self.advance()
                negate = True
            exponent = _fold_constant(self.primary(), pos)
            if negate:
                exponent = -exponent
            if not (float(exponent).is_integer() or exponent == 0.5):
                raise ExprSyntaxError(pos, "exponent must be an integer constant or 0.5; use exp/log")
            node = Pow(node, float(exponent))
        return node

    def primary(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "name":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                if t.text not in FUNCTIONS:
                    raise UnknownIdentifier(t.pos, f"unknown function {t.text!r}")
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Call(t.text, arg)
            return self.name(t)
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(t.pos, f"expected an operand, found {found}")

    def name(self, t: _Tok) -> Node:
        if t.text in CONSTANTS:
            return Num(CONSTANTS[t.text])
        m = re.fullmatch(r"([xy])(\d+)", t.text)
        if m is None:
            raise UnknownIdentifier(t.pos, f"unknown identifier {t.text!r}")
        fiber = m.group(1) == "y"
        if fiber and not self.allow_fiber:
            raise UnknownIdentifier(t.pos, f"fiber variable {t.text!r} not allowed here")
        index = int(m.group(2))
        if index >= self.dim:
            raise DimensionExceeded(t.pos, f"{t.text!r} exceeds dimension {self.dim}")
        return Var(fiber, index)


def _fold_constant(node: Node, pos: int) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg):
        return -_fold_constant(node.operand, pos)
    if isinstance(node, BinOp):
        a, b = _fold_constant(node.left, pos), _fold_constant(node.right, pos)
        if node.op == "/" and b == 0.0:
            raise ExprSyntaxError(pos, "division by zero in exponent")
        return {"+": a + b, "-": a - b, "*": a * b, "/": a / b if b else 0.0}[node.op]
    if isinstance(node, Pow):
        return _fold_constant(node.base, pos) ** node.exponent
    raise ExprSyntaxError(pos, "exponent must be constant")


def to_source(node: Node) -> str:
    """Fully parenthesized source that parses back to the same tree."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return f"{'y' if node.fiber else 'x'}{node.index}"
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Pow):
        return f"({to_source(node.base)}^{node.exponent!r})"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    raise TypeError(node)


class ScalarFieldExpr:
    """Parsed, immutable scalar expression in ``dim`` base (and fiber) coordinates."""

    __slots__ = ("ast", "dim", "allow_fiber_vars", "source", "_fiber")

    def __init__(self, ast: Node, dim: int, allow_fiber_vars: bool = False, source: str | None = None):
        self.ast = ast
        self.dim = dim
        self.allow_fiber_vars = allow_fiber_vars
        self.source = source if source is not None else to_source(ast)
        self._fiber = _uses_fiber(ast)

    @property
    def uses_fiber(self) -> bool:
        return self._fiber

    @property
    def is_constant(self) -> bool:
        return _is_const(self.ast)

    def __repr__(self) -> str:
        return f"ScalarFieldExpr({self.source!r}, dim={self.dim})"

    def __str__(self) -> str:
        return self.source

    def __eq__(self, other) -> bool:
        return isinstance(other, ScalarFieldExpr) and self.ast == other.ast and self.dim == other.dim

    def __hash__(self) -> int:
        return hash((self.ast, self.dim))

    def taylor(self, xs: Sequence[Jet], ys: Sequence[Jet] | None = None) -> Jet:
        """Evaluate with coordinate jets ``xs`` (and fiber jets ``ys``)."""
        return _evaluate(self.ast, xs, ys, xs[0].space)

    def __call__(self, *point: float) -> float:
        return float(eval_jet(self, point, 0).value)


def parse(source: str, dim: int, allow_fiber_vars: bool = False) -> ScalarFieldExpr:
    if not source or not source.strip():
        raise ExprSyntaxError(0, "empty expression")
    if dim < 1:
        raise ValueError("dimension must be positive")
    return ScalarFieldExpr(_Parser(source, dim, allow_fiber_vars).parse(), dim, allow_fiber_vars, source.strip())


def constant(value: float, dim: int) -> ScalarFieldExpr:
    return ScalarFieldExpr(Num(float(value)), dim)


def eval_jet(expr: ScalarFieldExpr, point: Sequence[float], order: int = 3) -> Jet3:
    """Value and all partials up to ``order`` (<= 3) at ``point``.

    ``point`` lists the base coordinates, followed by the fiber coordinates
    when the expression was parsed with fiber variables allowed.
    """
    if not 0 <= order <= 3:
        raise ValueError("order must be between 0 and 3")
    n = expr.dim
    want = 2 * n if expr.allow_fiber_vars else n
    if len(point) != want:
        raise ValueError(f"expected {want} coordinates, got {len(point)}")
    sp = get_space(want, order)
    jets = [Jet.variable(sp, i, float(v)) for i, v in enumerate(point)]
    value = expr.taylor(jets[:n], jets[n:] if expr.allow_fiber_vars else None)
    return Jet3.from_jet(value)


def _uses_fiber(node: Node) -> bool:
    if isinstance(node, Var):
        return node.fiber
    if isinstance(node, Num):
        return False
    if isinstance(node, (Neg,)):
        return _uses_fiber(node.operand)
    if isinstance(node, BinOp):
        return _uses_fiber(node.left) or _uses_fiber(node.right)
    if isinstance(node, Pow):
        return _uses_fiber(node.base)
    return _uses_fiber(node.arg)


def _is_const(node: Node) -> bool:
    if isinstance(node, Num):
        return True
    if isinstance(node, Var):
        return False
    if isinstance(node, Neg):
        return _is_const(node.operand)
    if isinstance(node, BinOp):
        return _is_const(node.left) and _is_const(node.right)
    if isinstance(node, Pow):
        return _is_const(node.base)
    return _is_const(node.arg)


def _evaluate(node: Node, xs, ys, space) -> Jet:
    if isinstance(node, Num):
        return Jet.constant(space, node.value)
    if isinstance(node, Var):
        if node.fiber:
            if ys is None:
                raise ValueError("fiber variable evaluated without fiber coordinates")
            return ys[node.index]
        return xs[node.index]
    if isinstance(node, Neg):
        return -_evaluate(node.operand, xs, ys, space)
    if isinstance(node, BinOp):
        a = _evaluate(node.left, xs, ys, space)
        b = _evaluate(node.right, xs, ys, space)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Pow):
        return _evaluate(node.base, xs, ys, space) ** node.exponent
    return FUNCTIONS[node.func](_evaluate(node.arg, xs, ys, space))


def evaluate_array(exprs: np.ndarray, xs: Sequence[Jet], ys: Sequence[Jet] | None = None) -> Jet:
    """Evaluate an object array of expressions into one jet of the same shape."""
    exprs = np.asarray(exprs, dtype=object)
    space = xs[0].space
    out = Jet.zeros(space, exprs.shape)
    cache: dict[ScalarFieldExpr, Jet] = {}
    for idx in np.ndindex(exprs.shape):
        e = exprs[idx]
        if e is None:
            continue
        if e not in cache:
            cache[e] = e.taylor(xs, ys)
        out[idx] = cache[e]
    return out
