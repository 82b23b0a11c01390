"""Arithmetic expressions for vector fields.

Grammar::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | primary
    primary := NUMBER | 'pi' | VAR | FUNC '(' expr ')' | '(' expr ')'

Variables are ``x1 .. xd``.  Evaluation is vectorized with numpy.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

FUNCTIONS = {"sin": np.sin, "cos": np.cos, "exp": np.exp}
CONSTANTS = {"pi": math.pi}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/(),]))"
)


class FieldSyntaxError(ValueError):
    """Malformed expression; ``position`` is a character offset into ``source``."""

    def __init__(self, message, source="", position=0, component=None):
        self.message = message
        self.source = source
        self.position = position
        self.component = component
        where = f"component {component}, " if component is not None else ""
        super().__init__(f"{where}offset {position}: {message}")


class UnknownIdentifier(FieldSyntaxError):
    pass


class ArityError(FieldSyntaxError):
    pass


@dataclass(frozen=True)
class Num:
    value: float

    def eval(self, xs):
        return self.value

    def show(self):
        return repr(float(self.value))


@dataclass(frozen=True)
class Var:
    index: int  # 0-based

    def eval(self, xs):
        return xs[self.index]

    def show(self):
        return f"x{self.index + 1}"


@dataclass(frozen=True)
class Neg:
    arg: object

    def eval(self, xs):
        return -self.arg.eval(xs)

    def show(self):
        return f"(-{self.arg.show()})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def eval(self, xs):
        a = self.left.eval(xs)
        b = self.right.eval(xs)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.true_divide(a, b)

    def show(self):
        return f"({self.left.show()} {self.op} {self.right.show()})"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: object

    def eval(self, xs):
        with np.errstate(over="ignore", invalid="ignore"):
            return FUNCTIONS[self.fn](self.arg.eval(xs))

    def show(self):
        return f"{self.fn}({self.arg.show()})"


class _Parser:
    def __init__(self, source, dimension, component):
        self.source = source
        self.dimension = dimension
        self.component = component
        self.tokens = self._tokenize()
        self.i = 0

    def _error(self, cls, msg, pos):
        return cls(msg, self.source, pos, self.component)

    def _tokenize(self):
        toks = []
        pos = 0
        src = self.source
        while True:
            while pos < len(src) and src[pos].isspace():
                pos += 1
            if pos >= len(src):
                break
            m = _TOKEN.match(src, pos)
            if not m:
                raise self._error(FieldSyntaxError, f"unexpected character {src[pos]!r}", pos)
            kind = m.lastgroup
            toks.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        toks.append(("end", "", len(src)))
        return toks

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, val, pos = self.take()
        if val != text or kind != "op":
            found = "end of input" if kind == "end" else repr(val)
            raise self._error(FieldSyntaxError, f"expected {text!r}, found {found}", pos)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise self._error(FieldSyntaxError, f"unexpected {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            arg = self.unary()
            return Neg(arg) if val == "-" else arg
        return self.primary()

    def primary(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if val in FUNCTIONS:
                if self.peek()[1] != "(":
                    raise self._error(FieldSyntaxError, f"function {val!r} needs an argument", self.peek()[2])
                self.take()
                arg = self.expr()
                k, v, p = self.peek()
                if v == ",":
                    raise self._error(ArityError, f"{val} takes exactly one argument", p)
                self.expect(")")
                return Call(val, arg)
            if val in CONSTANTS:
                return Num(CONSTANTS[val])
            m = re.fullmatch(r"x(\d+)", val)
            if m and 1 <= int(m.group(1)) <= self.dimension:
                return Var(int(m.group(1)) - 1)
            raise self._error(UnknownIdentifier, f"unknown identifier {val!r}", pos)
        found = "end of input" if kind == "end" else repr(val)
        raise self._error(FieldSyntaxError, f"expected an operand, found {found}", pos)


def parse_expression(source: str, dimension: int, component: int | None = None):
    return _Parser(source, dimension, component).parse()


@dataclass(frozen=True)
class VectorField:
    components: tuple
    sources: tuple[str, ...]

    @property
    def dimension(self) -> int:
        return len(self.components)

    def __call__(self, points) -> np.ndarray:
        """Evaluate at points of shape ``(..., d)``."""
        pts = np.asarray(points, dtype=float)
        xs = [pts[..., a] for a in range(self.dimension)]
        out = np.empty(pts.shape, dtype=float)
        for a, node in enumerate(self.components):
            out[..., a] = node.eval(xs)
        return out

    def show(self) -> list[str]:
        return [node.show() for node in self.components]


def parse_field(source: Sequence[str], dimension: int) -> VectorField:
    if isinstance(source, str):
        source = [source]
    source = list(source)
    if len(source) != dimension:
        raise ArityError(f"got {len(source)} component expressions for dimension {dimension}")
    nodes = tuple(parse_expression(s, dimension, a) for a, s in enumerate(source))
    return VectorField(nodes, tuple(source))
