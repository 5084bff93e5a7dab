"""A small expression language for surface and profile definitions.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | NAME | NAME '(' args ')' | '(' expr ')'

Names are the variables ``u`` and ``v``, the constants ``pi`` and ``e``, and
the unary functions in :data:`FUNCTIONS`. Error offsets are 1-based columns.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .errors import ArityError, ExprSyntaxError, JetError, UnknownIdentifier

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "tan", "exp", "ln", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("u", "v")

_SCALAR = {
    "sin": math.sin,
    "cos": math.cos,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "tan": math.tan,
    "exp": math.exp,
    "ln": math.log,
    "sqrt": math.sqrt,
    "abs": abs,
}


@dataclass(frozen=True)
class Node:
    span: tuple = field(default=(0, 0), compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Num(Node):
    value: float


@dataclass(frozen=True)
class Const(Node):
    name: str


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Neg(Node):
    operand: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(src):
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(src, pos)
        if m is None:
            rest = src[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ExprSyntaxError(f"unexpected character {src[bad]!r}", bad + 1)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start + 1, m.end() + 1))
        pos = m.end()
    tokens.append(("end", "", len(src) + 1, len(src) + 1))
    return tokens


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        tok = self.peek()
        if tok[1] != text:
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ExprSyntaxError(f"expected {text!r}, found {found}", tok[2])
        return self.take()

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            right = self.term()
            node = BinOp(op, node, right, span=(node.span[0], right.span[1]))
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            right = self.unary()
            node = BinOp(op, node, right, span=(node.span[0], right.span[1]))
        return node

    def unary(self):
        tok = self.peek()
        if tok[1] == "-":
            self.take()
            operand = self.unary()
            return Neg(operand, span=(tok[2], operand.span[1]))
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            exponent = self.unary()
            return BinOp("^", base, exponent, span=(base.span[0], exponent.span[1]))
        return base

    def atom(self):
        kind, text, start, end = self.take()
        if kind == "num":
            return Num(float(text), span=(start, end))
        if kind == "name":
            if self.peek()[1] == "(":
                if text not in FUNCTIONS:
                    raise UnknownIdentifier(text, start)
                self.take()
                args = [self.expr()]
                while self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                close = self.expect(")")
                if len(args) != 1:
                    raise ArityError(text, 1, len(args), start)
                return Call(text, args[0], span=(start, close[3]))
            if text in VARIABLES:
                return Var(text, span=(start, end))
            if text in CONSTANTS:
                return Const(text, span=(start, end))
            if text in FUNCTIONS:
                raise ArityError(text, 1, 0, start)
            raise UnknownIdentifier(text, start)
        if text == "(":
            node = self.expr()
            close = self.expect(")")
            return _respan(node, (start, close[3]))
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", start)
        raise ExprSyntaxError(f"unexpected {text!r}", start)


def _respan(node, span):
    # dataclasses.replace would re-run __init__ with span as kw; keep it simple
    object.__setattr__(node, "span", span)
    return node


def parse(src: str) -> Node:
    """Parse ``src`` into an expression tree."""
    return _Parser(src).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return 5


def unparse(node: Node) -> str:
    """Render a tree with the minimal parentheses needed to reparse it identically."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, (Const, Var)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({unparse(node.arg)})"
    if isinstance(node, Neg):
        inner = unparse(node.operand)
        if _prec(node.operand) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    p = _PREC[node.op]
    left, right = unparse(node.left), unparse(node.right)
    if node.op == "^":
        # base must be an atom; exponent may be a unary minus or another power
        if _prec(node.left) <= p:
            left = f"({left})"
        if _prec(node.right) < _PREC["neg"]:
            right = f"({right})"
    else:
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
    sep = " " if p == 1 else ""
    return f"{left}{sep}{node.op}{sep}{right}"


def variables(node: Node) -> set:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Neg):
        return variables(node.operand)
    if isinstance(node, Call):
        return variables(node.arg)
    if isinstance(node, BinOp):
        return variables(node.left) | variables(node.right)
    return set()


def evaluate(node: Node, u: float = 0.0, v: float = 0.0) -> float:
    """Plain scalar evaluation with :mod:`math` (no jets involved)."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return CONSTANTS[node.name]
    if isinstance(node, Var):
        return u if node.name == "u" else v
    if isinstance(node, Neg):
        return -evaluate(node.operand, u, v)
    if isinstance(node, Call):
        return _SCALAR[node.func](evaluate(node.arg, u, v))
    a, b = evaluate(node.left, u, v), evaluate(node.right, u, v)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return a / b
    return a**b


def eval_jet(node: Node, u: jets.Jet, v: jets.Jet) -> jets.Jet:
    """Evaluate a tree over jet arithmetic.

    Jet errors carry the span of the innermost offending subexpression.
    """
    try:
        return _eval_node(node, u, v)
    except JetError as exc:
        if exc.span is None:
            exc.span = node.span
        raise


def _eval_node(node, u, v):
    if isinstance(node, Num):
        return jets.as_jet(np.broadcast_to(node.value, u.shape), u.order)
    if isinstance(node, Const):
        return jets.as_jet(np.broadcast_to(CONSTANTS[node.name], u.shape), u.order)
    if isinstance(node, Var):
        return u if node.name == "u" else v
    if isinstance(node, Neg):
        return -eval_jet(node.operand, u, v)
    if isinstance(node, Call):
        return jets.lift(node.func, eval_jet(node.arg, u, v))
    if node.op == "^":
        base = eval_jet(node.left, u, v)
        power = _constant_value(node.right)
        if power is None:
            power = eval_jet(node.right, u, v)
        return base**power
    a, b = eval_jet(node.left, u, v), eval_jet(node.right, u, v)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    return a / b


def _constant_value(node):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg):
        inner = _constant_value(node.operand)
        return None if inner is None else -inner
    return None


def compile_field(src_or_node, allowed=VARIABLES):
    """Parse (if needed) and check the variable set; returns the tree."""
    node = parse(src_or_node) if isinstance(src_or_node, str) else src_or_node
    extra = variables(node) - set(allowed)
    if extra:
        name = sorted(extra)[0]
        raise UnknownIdentifier(name, _find_var(node, name))
    return node


def _find_var(node, name):
    if isinstance(node, Var) and node.name == name:
        return node.span[0]
    for child in _children(node):
        found = _find_var(child, name)
        if found:
            return found
    return 0


def _children(node):
    if isinstance(node, Neg):
        return (node.operand,)
    if isinstance(node, Call):
        return (node.arg,)
    if isinstance(node, BinOp):
        return (node.left, node.right)
    return ()


def random_expression(rng: np.random.Generator, depth=4, variables=VARIABLES) -> Node:
    """Random smooth tree in ``variables``, bounded on bounded inputs.

    Exponentials only see sine-wrapped arguments and divisions have
    denominators ``2 + cos(.)``, so the result is finite for every real input.
    Used by the randomized property suites.
    """
    if depth <= 0 or rng.random() < 0.15:
        if rng.random() < 0.3:
            return Num(round(float(rng.uniform(0.1, 2.0)), 3))
        return Var(str(rng.choice(list(variables))))
    kind = rng.integers(7)
    sub = lambda: random_expression(rng, depth - 1, variables)  # noqa: E731
    if kind == 0:
        return BinOp(str(rng.choice(["+", "-", "*"])), sub(), sub())
    if kind == 1:
        return Call(str(rng.choice(["sin", "cos"])), sub())
    if kind == 2:
        return Call("exp", Call("sin", sub()))
    if kind == 3:
        return BinOp("/", sub(), BinOp("+", Num(2.0), Call("cos", sub())))
    if kind == 4:
        return BinOp("^", sub(), Num(2.0))
    if kind == 5:
        return BinOp("*", Num(round(float(rng.uniform(0.1, 2.0)), 3)), sub())
    return Neg(sub())
