"""The propositional language over primitives ``A in Delta``.

Grammar, loosest binding first::

    prop    := or ("=>" prop)?          right-associative
    or      := and ("or" and)*
    and     := unary ("and" unary)*
    unary   := "not" unary | "(" prop ")" | IDENT "in" borel

Glyphs are accepted as aliases: ``¬ ∧ ∨ ⇒ → ∈``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .borel import BorelSet, parse_borel
from .contexts import ContextPoset
from .errors import DimensionMismatch, ParseError, UnknownName
from .operators import SelfAdjointOperator, spectral_projector
from .subobjects import ClopenSubobject, daseinise_subobject, sub_implies, sub_join, sub_meet, sub_neg


@dataclass(frozen=True)
class Primitive:
    name: str
    delta: BorelSet


@dataclass(frozen=True)
class Not:
    operand: "Proposition"


@dataclass(frozen=True)
class And:
    left: "Proposition"
    right: "Proposition"


@dataclass(frozen=True)
class Or:
    left: "Proposition"
    right: "Proposition"


@dataclass(frozen=True)
class Implies:
    left: "Proposition"
    right: "Proposition"


Proposition = Union[Primitive, Not, And, Or, Implies]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_KEYWORDS = {"not", "and", "or", "in"}
_ALIASES = {"¬": "not", "∧": "and", "∨": "or", "⇒": "=>", "→": "=>", "∈": "in"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: int | None = None):
        raise ParseError(message, self.text, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        """The next token kind without consuming it."""
        self.skip()
        t = self.text
        if self.pos >= len(t):
            return None
        c = t[self.pos]
        if c in _ALIASES:
            return _ALIASES[c]
        if t.startswith("=>", self.pos):
            return "=>"
        if c in "()":
            return c
        m = _IDENT.match(t, self.pos)
        if m:
            word = m.group(0)
            return word if word in _KEYWORDS else "ident"
        return c

    def take(self, kind: str) -> str:
        got = self.peek()
        if got != kind:
            expected = "an identifier" if kind == "ident" else repr(kind)
            found = "end of input" if got is None else repr(self.text[self.pos])
            self.error(f"expected {expected}, found {found}")
        t = self.text
        if t[self.pos] in _ALIASES:
            self.pos += 1
            return _ALIASES[t[self.pos - 1]]
        if kind in ("ident", "not", "and", "or", "in"):
            m = _IDENT.match(t, self.pos)
            self.pos = m.end()
            return m.group(0)
        self.pos += len(kind)
        return kind

    def parse(self) -> Proposition:
        node = self.implication()
        if self.peek() is not None:
            self.error(f"unexpected {self.text[self.pos]!r}")
        return node

    def implication(self) -> Proposition:
        left = self.disjunction()
        if self.peek() == "=>":
            self.take("=>")
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Proposition:
        node = self.conjunction()
        while self.peek() == "or":
            self.take("or")
            node = Or(node, self.conjunction())
        return node

    def conjunction(self) -> Proposition:
        node = self.unary()
        while self.peek() == "and":
            self.take("and")
            node = And(node, self.unary())
        return node

    def unary(self) -> Proposition:
        kind = self.peek()
        if kind == "not":
            self.take("not")
            return Not(self.unary())
        if kind == "(":
            self.take("(")
            node = self.implication()
            self.take(")")
            return node
        if kind == "ident":
            name = self.take("ident")
            self.take("in")
            self.skip()
            delta, self.pos = parse_borel(self.text, self.pos)
            return Primitive(name, delta)
        if kind is None:
            self.error("unexpected end of input")
        self.error(f"expected a proposition, found {self.text[self.pos]!r}")


def parse(text: str) -> Proposition:
    """Parse a proposition; errors carry the offending position."""
    return _Parser(text).parse()


_PREC = {Implies: 1, Or: 2, And: 3, Not: 4, Primitive: 5}


def _wrap(node: Proposition, paren: bool) -> str:
    s = to_text(node)
    return f"({s})" if paren else s


def to_text(node: Proposition) -> str:
    """Canonical text with the fewest parentheses that still parse back to ``node``."""
    if isinstance(node, Primitive):
        return f"{node.name} in {node.delta}"
    if isinstance(node, Not):
        return "not " + _wrap(node.operand, _PREC[type(node.operand)] < _PREC[Not])
    prec = _PREC[type(node)]
    lp, rp = _PREC[type(node.left)], _PREC[type(node.right)]
    if isinstance(node, Implies):
        return f"{_wrap(node.left, lp <= prec)} => {_wrap(node.right, rp < prec)}"
    word = "and" if isinstance(node, And) else "or"
    return f"{_wrap(node.left, lp < prec)} {word} {_wrap(node.right, rp <= prec)}"


def names(node: Proposition) -> set[str]:
    if isinstance(node, Primitive):
        return {node.name}
    if isinstance(node, Not):
        return names(node.operand)
    return names(node.left) | names(node.right)


def represent(
    node: Proposition, operators: Mapping[str, SelfAdjointOperator], poset: ContextPoset
) -> ClopenSubobject:
    """The clopen sub-object of a proposition: daseinised primitives, Heyting connectives."""
    if isinstance(node, Primitive):
        try:
            a = operators[node.name]
        except KeyError:
            raise UnknownName(f"unknown quantity {node.name!r}; known: {sorted(operators)}") from None
        if a.dim != poset.dim:
            raise DimensionMismatch(f"quantity {node.name!r} has dimension {a.dim}, contexts have {poset.dim}")
        return daseinise_subobject(spectral_projector(a, node.delta), poset)
    if isinstance(node, Not):
        return sub_neg(represent(node.operand, operators, poset))
    left = represent(node.left, operators, poset)
    right = represent(node.right, operators, poset)
    if isinstance(node, And):
        return sub_meet(left, right)
    if isinstance(node, Or):
        return sub_join(left, right)
    return sub_implies(left, right)
