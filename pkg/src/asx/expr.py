"""Small expression language for user-defined spectra f(kx, ky, kz).

Grammar (standard infix, whitespace insignificant, case-sensitive):

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' signed-integer)*
    atom    := number | name | name '(' sum ')' | '(' sum ')'

Names: variables ``kx ky kz k0``, constants ``i pi``, functions
``exp sqrt sin cos``.  Exponents are integer literals only, so no
multivalued complex powers arise; ``sqrt`` uses the principal branch.
Malformed input raises :class:`SpectrumParseError` with a 1-based column
and the set of token classes that would have been accepted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import SpectrumEvaluationError, SpectrumParseError

__all__ = [
    "Number",
    "Name",
    "Neg",
    "BinOp",
    "Power",
    "Call",
    "parse_expression",
    "format_expression",
    "evaluate_tree",
    "VARIABLES",
    "CONSTANTS",
    "FUNCTIONS",
]

VARIABLES = ("kx", "ky", "kz", "k0")
CONSTANTS = {"i": 1j, "pi": np.pi}
FUNCTIONS = {"exp": np.exp, "sqrt": np.sqrt, "sin": np.sin, "cos": np.cos}


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Number, Name, Neg, BinOp, Power, Call]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num | name | op | end
    text: str
    pos: int  # 1-based column


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    index = 0
    while index < len(src):
        m = _TOKEN_RE.match(src, index)
        if m is None or m.end() == index:
            # skip over trailing whitespace before declaring garbage
            rest = src[index:]
            stripped = rest.lstrip()
            if not stripped:
                break
            col = index + (len(rest) - len(stripped)) + 1
            raise SpectrumParseError(
                f"unrecognized character {stripped[0]!r} at column {col}",
                position=col,
                expected=("number", "identifier", "operator"),
            )
        if m.group("num") is not None:
            tokens.append(_Token("num", m.group("num"), m.start("num") + 1))
        elif m.group("name") is not None:
            tokens.append(_Token("name", m.group("name"), m.start("name") + 1))
        else:
            tokens.append(_Token("op", m.group("op"), m.start("op") + 1))
        index = m.end()
    tokens.append(_Token("end", "", len(src) + 1))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.at = 0

    def peek(self) -> _Token:
        return self.tokens[self.at]

    def advance(self) -> _Token:
        tok = self.tokens[self.at]
        self.at += 1
        return tok

    def fail(self, message: str, tok: _Token, expected: tuple[str, ...]):
        shown = tok.text if tok.kind != "end" else "end of input"
        raise SpectrumParseError(
            f"{message}: got {shown!r} at column {tok.pos}"
            + (f", expected one of {', '.join(expected)}" if expected else ""),
            position=tok.pos,
            expected=expected,
        )

    def expect_op(self, op: str):
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            if op == ")":
                self.fail("unbalanced parenthesis", tok, (f"'{op}'",))
            self.fail("syntax error", tok, (f"'{op}'",))
        return self.advance()

    def parse(self) -> Node:
        node = self.sum()
        tok = self.peek()
        if tok.kind != "end":
            self.fail("trailing input", tok, ("'+'", "'-'", "'*'", "'/'", "'^'"))
        return node

    def sum(self) -> Node:
        node = self.product()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.product())
        return node

    def product(self) -> Node:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            tok = self.advance()
            right = self.unary()
            if tok.text == "/" and isinstance(right, Number) and right.value == 0.0:
                raise SpectrumParseError(
                    f"division by constant zero at column {tok.pos}",
                    position=tok.pos,
                    expected=(),
                )
            node = BinOp(tok.text, node, right)
        return node

    def unary(self) -> Node:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.unary())
        if tok.kind == "op" and tok.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        while self.peek().kind == "op" and self.peek().text == "^":
            self.advance()
            node = Power(node, self.integer_exponent())
        return node

    def integer_exponent(self) -> int:
        sign = 1
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.advance()
            if tok.text == "-":
                sign = -1
            tok = self.peek()
        if tok.kind != "num" or not re.fullmatch(r"\d+", tok.text):
            self.fail("exponent must be an integer literal", tok, ("integer",))
        self.advance()
        return sign * int(tok.text)

    def atom(self) -> Node:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Number(float(tok.text))
        if tok.kind == "name":
            self.advance()
            follow = self.peek()
            if follow.kind == "op" and follow.text == "(":
                if tok.text not in FUNCTIONS:
                    raise SpectrumParseError(
                        f"unknown function {tok.text!r} at column {tok.pos}",
                        position=tok.pos,
                        expected=tuple(sorted(FUNCTIONS)),
                    )
                self.advance()
                arg = self.sum()
                self.expect_op(")")
                return Call(tok.text, arg)
            if tok.text in VARIABLES or tok.text in CONSTANTS:
                return Name(tok.text)
            raise SpectrumParseError(
                f"unknown identifier {tok.text!r} at column {tok.pos}",
                position=tok.pos,
                expected=VARIABLES + tuple(sorted(CONSTANTS)),
            )
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.sum()
            self.expect_op(")")
            return node
        self.fail("syntax error", tok, ("number", "identifier", "'('", "'-'"))


def parse_expression(src: str) -> Node:
    """Parse ``src`` into an expression tree or raise SpectrumParseError."""
    if not src or not src.strip():
        raise SpectrumParseError("empty expression", position=1, expected=("number", "identifier", "'('"))
    return _Parser(src).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    if isinstance(node, Power):
        return _PREC["^"]
    return _PREC["atom"]


def _fmt_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def format_expression(node: Node) -> str:
    """Canonical text for a tree; parse(format(t)) reproduces t."""
    if isinstance(node, Number):
        return _fmt_number(node.value)
    if isinstance(node, Name):
        return node.ident
    if isinstance(node, Neg):
        inner = format_expression(node.arg)
        if _prec(node.arg) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Power):
        base = format_expression(node.base)
        # power binds tightest, so any structured base needs parentheses
        if _prec(node.base) < _PREC["atom"]:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.func}({format_expression(node.arg)})"
    if isinstance(node, BinOp):
        lhs = format_expression(node.left)
        rhs = format_expression(node.right)
        prec = _PREC[node.op]
        if _prec(node.left) < prec:
            lhs = f"({lhs})"
        # - and / are left-associative: the right operand needs parens at
        # equal precedence too
        right_min = prec + (1 if node.op in "-/" else 0)
        if _prec(node.right) < right_min:
            rhs = f"({rhs})"
        return f"{lhs}{node.op}{rhs}"
    raise TypeError(f"not an expression node: {node!r}")


def evaluate_tree(node: Node, env: dict):
    """Evaluate a tree over an environment of scalars or numpy arrays."""
    if isinstance(node, Number):
        return complex(node.value)
    if isinstance(node, Name):
        if node.ident in CONSTANTS:
            return CONSTANTS[node.ident]
        return env[node.ident]
    if isinstance(node, Neg):
        return -evaluate_tree(node.arg, env)
    if isinstance(node, Call):
        return FUNCTIONS[node.func](np.asarray(evaluate_tree(node.arg, env), dtype=complex))
    if isinstance(node, Power):
        base = evaluate_tree(node.base, env)
        if node.exponent < 0 and np.any(np.asarray(base) == 0):
            raise SpectrumEvaluationError("zero raised to a negative power")
        return np.asarray(base, dtype=complex) ** node.exponent
    if isinstance(node, BinOp):
        left = evaluate_tree(node.left, env)
        right = evaluate_tree(node.right, env)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if np.any(np.asarray(right) == 0):
            raise SpectrumEvaluationError("division by zero at the evaluation point")
        return left / right
    raise TypeError(f"not an expression node: {node!r}")
