"""Hybrid-logic formulas: AST, parser, printer and structural measures.

Surface syntax (ASCII, unicode alternatives in brackets)::

    formula := imp
    imp     := or ( "->" imp )?                 right associative   [→]
    or      := and ( "|" and )*                 left associative    [∨]
    and     := unary ( "&" unary )*             left associative    [∧]
    unary   := "~" unary | "[]" unary | "<>" unary | "@" IDENT unary | atom
                                                                    [¬ □ ◇]
    atom    := "(" formula ")" | "R" "(" IDENT "," IDENT ")" | IDENT
    IDENT   := [A-Za-z_][A-Za-z0-9_']*

Nominals and propositional variables live in disjoint namespaces.  An
identifier is a nominal when it is declared as one, when it appears in a
nominal position anywhere in the same input (after ``@``, inside ``R(..)``,
or as a sequent label), or, failing both, when its first letter is one of
``i j k l m n``.  Everything else is a propositional variable.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass
from functools import lru_cache
from operator import attrgetter
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "Prop", "Nom", "Rel", "And", "Or", "Imp", "Neg", "At", "Box", "Dia",
    "Formula", "ParseError", "NamespaceError", "parse", "to_text",
    "degree", "is_elementary", "nominals_of", "props_of", "subformulas",
    "NOMINAL_INITIALS", "fresh_nominals", "rename_nominals",
]

NOMINAL_INITIALS = frozenset("ijklmn")


class Node:
    """Structural equality with a hash computed once per immutable node."""

    __slots__ = ("_hash",)
    _getters: dict = {}

    def _key(self):
        get = Node._getters.get(type(self))
        if get is None:
            get = Node._getters[type(self)] = attrgetter(*self.__match_args__)
        return get(self)

    def __hash__(self) -> int:
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_hash", h)
            return h

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(other) is not type(self):
            return NotImplemented
        return hash(self) == hash(other) and self._key() == other._key()


class FormulaNode(Node):
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, eq=False, slots=True)
class Prop(FormulaNode):
    name: str


@dataclass(frozen=True, eq=False, slots=True)
class Nom(FormulaNode):
    name: str


@dataclass(frozen=True, eq=False, slots=True)
class Rel(FormulaNode):
    """``R(src, dst)``: the world named ``dst`` is accessible from ``src``."""

    src: str
    dst: str


@dataclass(frozen=True, eq=False, slots=True)
class And(FormulaNode):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, eq=False, slots=True)
class Or(FormulaNode):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, eq=False, slots=True)
class Imp(FormulaNode):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, eq=False, slots=True)
class Neg(FormulaNode):
    body: "Formula"


@dataclass(frozen=True, eq=False, slots=True)
class At(FormulaNode):
    nominal: str
    body: "Formula"


@dataclass(frozen=True, eq=False, slots=True)
class Box(FormulaNode):
    body: "Formula"


@dataclass(frozen=True, eq=False, slots=True)
class Dia(FormulaNode):
    body: "Formula"


Formula = Union[Prop, Nom, Rel, And, Or, Imp, Neg, At, Box, Dia]
ELEMENTARY = (Prop, Nom, Rel)
BINARY = (And, Or, Imp)
UNARY = (Neg, Box, Dia)


# --------------------------------------------------------------------------
# structural measures

def degree(phi: Formula) -> int:
    """Number of connectives (``& | -> ~ @ [] <>``) in ``phi``."""
    if isinstance(phi, ELEMENTARY):
        return 0
    if isinstance(phi, BINARY):
        return 1 + degree(phi.left) + degree(phi.right)
    return 1 + degree(phi.body)


def is_elementary(phi: Formula) -> bool:
    return isinstance(phi, ELEMENTARY)


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Pre-order walk over every subformula occurrence, ``phi`` included."""
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        if isinstance(f, BINARY):
            stack.append(f.right)
            stack.append(f.left)
        elif not isinstance(f, ELEMENTARY):
            stack.append(f.body)


@lru_cache(maxsize=8192)
def nominals_of(phi: Formula) -> frozenset[str]:
    out: set[str] = set()
    for f in subformulas(phi):
        if isinstance(f, Nom):
            out.add(f.name)
        elif isinstance(f, Rel):
            out.add(f.src)
            out.add(f.dst)
        elif isinstance(f, At):
            out.add(f.nominal)
    return frozenset(out)


def props_of(phi: Formula) -> frozenset[str]:
    return frozenset(f.name for f in subformulas(phi) if isinstance(f, Prop))


def rename_nominals(phi: Formula, mapping: Mapping[str, str]) -> Formula:
    """Replace nominals by ``mapping`` everywhere, including ``@`` and ``R``."""
    r = lambda n: mapping.get(n, n)  # noqa: E731
    if isinstance(phi, Prop):
        return phi
    if isinstance(phi, Nom):
        return Nom(r(phi.name))
    if isinstance(phi, Rel):
        return Rel(r(phi.src), r(phi.dst))
    if isinstance(phi, BINARY):
        return type(phi)(rename_nominals(phi.left, mapping), rename_nominals(phi.right, mapping))
    if isinstance(phi, At):
        return At(r(phi.nominal), rename_nominals(phi.body, mapping))
    return type(phi)(rename_nominals(phi.body, mapping))


def fresh_nominals(avoid: Iterable[str], count: int, prefix: str = "n") -> list[str]:
    """``count`` nominal names of the form ``n1, n2, ...`` not in ``avoid``."""
    taken = set(avoid)
    out = []
    k = 1
    while len(out) < count:
        name = f"{prefix}{k}"
        if name not in taken:
            out.append(name)
        k += 1
    return out


# --------------------------------------------------------------------------
# printing

_ASCII = {And: "&", Or: "|", Imp: "->", Neg: "~", Box: "[]", Dia: "<>"}
_UNICODE = {And: "∧", Or: "∨", Imp: "→", Neg: "¬", Box: "□", Dia: "◇"}


def to_text(phi: Formula, unicode: bool = False) -> str:
    """Render ``phi``; the output parses back to an equal AST.

    Binary operands that are themselves binary are parenthesised unless
    they repeat the parent connective on its associative side, so
    ``p & q | r`` prints as ``(p & q) | r``.
    """
    sym = _UNICODE if unicode else _ASCII
    return _render(phi, sym)


def _render(phi: Formula, sym: dict) -> str:
    if isinstance(phi, (Prop, Nom)):
        return phi.name
    if isinstance(phi, Rel):
        return f"R({phi.src},{phi.dst})"
    if isinstance(phi, BINARY):
        kind = type(phi)
        left = _render(phi.left, sym)
        right = _render(phi.right, sym)
        if isinstance(phi.left, BINARY) and (kind is Imp or type(phi.left) is not kind):
            left = f"({left})"
        if isinstance(phi.right, BINARY) and (kind is not Imp or type(phi.right) is not kind):
            right = f"({right})"
        return f"{left} {sym[kind]} {right}"
    body = _render(phi.body, sym)
    if isinstance(phi.body, BINARY):
        body = f"({body})"
    if isinstance(phi, At):
        return f"@{phi.nominal} {body}"
    return f"{sym[type(phi)]}{body}"


# --------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.message = message
        self.position = position
        where = "" if position is None else f" at position {position}"
        super().__init__(f"{message}{where}")


class NamespaceError(ParseError):
    """An identifier is used both as a nominal and as a propositional variable."""


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<imp>->|→)
  | (?P<turnstile>\|-|⊢)
  | (?P<box>\[\]|□)
  | (?P<dia><>|◇|◊)
  | (?P<and>&|∧)
  | (?P<or>\||∨)
  | (?P<neg>~|¬)
  | (?P<at>@)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<comma>,)
  | (?P<colon>:)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True, eq=False, slots=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


def nominal_positions(tokens: list[Token]) -> set[str]:
    """Identifiers that the grammar forces to be nominals."""
    found = set()
    for k, tok in enumerate(tokens):
        if tok.kind != "ident":
            continue
        prev = tokens[k - 1] if k else None
        nxt = tokens[k + 1]
        if prev is not None and prev.kind == "at":
            found.add(tok.text)
        elif nxt.kind == "colon":
            found.add(tok.text)
        elif tok.text == "R" and nxt.kind == "lparen":
            window = tokens[k + 1:k + 6]
            if [t.kind for t in window] == _REL_SHAPE:
                found.add(window[1].text)
                found.add(window[3].text)
    return found


_REL_SHAPE = ["lparen", "ident", "comma", "ident", "rparen"]


class Resolver:
    """Decides, per identifier, which namespace it belongs to."""

    def __init__(self, tokens: list[Token], nominals: Iterable[str] | None,
                 props: Iterable[str] | None, strict: bool):
        self.declared_noms = frozenset(nominals or ())
        self.declared_props = frozenset(props or ())
        self.strict = strict
        both = self.declared_noms & self.declared_props
        if both:
            raise NamespaceError(f"declared both nominal and proposition: {sorted(both)}")
        self.forced = nominal_positions(tokens)
        for tok in tokens:
            if tok.kind == "ident" and tok.text in self.forced and tok.text in self.declared_props:
                raise NamespaceError(
                    f"{tok.text!r} is declared a proposition but used as a nominal", tok.pos)

    def is_nominal(self, tok: Token) -> bool:
        name = tok.text
        if name in self.declared_noms:
            return True
        if name in self.declared_props:
            return False
        if self.strict:
            raise ParseError(f"undeclared identifier {name!r}", tok.pos)
        return name in self.forced or name[0] in NOMINAL_INITIALS

    def nominal(self, tok: Token) -> str:
        if tok.text in self.declared_props:
            raise NamespaceError(f"{tok.text!r} is a proposition, nominal expected", tok.pos)
        if self.strict and tok.text not in self.declared_noms:
            raise ParseError(f"undeclared nominal {tok.text!r}", tok.pos)
        return sys.intern(tok.text)


class Parser:
    def __init__(self, tokens: list[Token], resolver: Resolver):
        self.tokens = tokens
        self.k = 0
        self.resolver = resolver

    @property
    def peek(self) -> Token:
        return self.tokens[self.k]

    def advance(self) -> Token:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek
        if tok.kind != kind:
            shown = tok.text or "end of input"
            raise ParseError(f"expected {kind}, found {shown!r}", tok.pos)
        return self.advance()

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek.kind == "imp":
            self.advance()
            return Imp(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        phi = self.conjunction()
        while self.peek.kind == "or":
            self.advance()
            phi = Or(phi, self.conjunction())
        return phi

    def conjunction(self) -> Formula:
        phi = self.unary()
        while self.peek.kind == "and":
            self.advance()
            phi = And(phi, self.unary())
        return phi

    def unary(self) -> Formula:
        kind = self.peek.kind
        if kind == "neg":
            self.advance()
            return Neg(self.unary())
        if kind == "box":
            self.advance()
            return Box(self.unary())
        if kind == "dia":
            self.advance()
            return Dia(self.unary())
        if kind == "at":
            self.advance()
            name = self.resolver.nominal(self.expect("ident"))
            return At(name, self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek
        if tok.kind == "lparen":
            self.advance()
            phi = self.formula()
            self.expect("rparen")
            return phi
        if tok.kind == "ident":
            self.advance()
            if tok.text == "R" and self.peek.kind == "lparen":
                self.advance()
                a = self.resolver.nominal(self.expect("ident"))
                self.expect("comma")
                b = self.resolver.nominal(self.expect("ident"))
                self.expect("rparen")
                return Rel(a, b)
            if self.resolver.is_nominal(tok):
                return Nom(sys.intern(tok.text))
            return Prop(sys.intern(tok.text))
        shown = tok.text or "end of input"
        raise ParseError(f"unexpected {shown!r}", tok.pos)


def parse(text: str, nominals: Iterable[str] | None = None,
          props: Iterable[str] | None = None, strict: bool = False) -> Formula:
    """Parse ``text`` into a formula.

    ``nominals``/``props`` declare identifiers explicitly; with ``strict``
    every identifier must be declared, which catches typos.
    """
    tokens = tokenize(text)
    parser = Parser(tokens, Resolver(tokens, nominals, props, strict))
    phi = parser.formula()
    if parser.peek.kind != "eof":
        raise ParseError(f"trailing input {parser.peek.text!r}", parser.peek.pos)
    return phi
