"""Labelled formulas and sequents.

A sequent ``Γ ⊢ Δ`` is a pair of multisets; members are kept in a canonical
order so that ``==`` is multiset equality.  Text form::

    i: [](p & q), j: R(i,j) |- j: p        (or with ⊢)
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from ..syntax import (Formula, ParseError, Parser, Resolver, is_elementary,
                      nominals_of, rename_nominals, to_text, tokenize)

__all__ = ["LabeledFormula", "Sequent", "parse_sequent", "parse_labeled", "LEFT", "RIGHT"]

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True, slots=True)
class LabeledFormula:
    """``label: formula``; a ``None`` label is the unlabelled root goal."""

    label: str | None
    formula: Formula

    def text(self, unicode: bool = False) -> str:
        body = to_text(self.formula, unicode)
        return body if self.label is None else f"{self.label}: {body}"

    def __str__(self) -> str:
        return self.text()

    def nominals(self) -> frozenset[str]:
        out = nominals_of(self.formula)
        return out if self.label is None else out | {self.label}

    @property
    def elementary(self) -> bool:
        return is_elementary(self.formula)

    def rename(self, mapping) -> "LabeledFormula":
        label = None if self.label is None else mapping.get(self.label, self.label)
        return LabeledFormula(label, rename_nominals(self.formula, mapping))

    def sort_key(self):
        return (self.label or "", to_text(self.formula))


def _canonical(items: Iterable[LabeledFormula]) -> tuple[LabeledFormula, ...]:
    return tuple(sorted(items, key=LabeledFormula.sort_key))


@dataclass(frozen=True)
class Sequent:
    left: tuple[LabeledFormula, ...] = ()
    right: tuple[LabeledFormula, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "left", _canonical(self.left))
        object.__setattr__(self, "right", _canonical(self.right))

    def side(self, which: str) -> tuple[LabeledFormula, ...]:
        return self.left if which == LEFT else self.right

    def count(self, which: str, lf: LabeledFormula) -> int:
        return self.side(which).count(lf)

    def nominals(self) -> frozenset[str]:
        out: set[str] = set()
        for lf in self.left + self.right:
            out |= lf.nominals()
        return frozenset(out)

    @property
    def elementary(self) -> bool:
        return all(lf.elementary for lf in self.left + self.right)

    @property
    def labelled(self) -> bool:
        return all(lf.label is not None for lf in self.left + self.right)

    def replace(self, which: str, remove: LabeledFormula | None = None,
                add: Iterable[LabeledFormula] = (), add_other: Iterable[LabeledFormula] = ()
                ) -> "Sequent":
        """Drop one copy of ``remove`` from side ``which``, then add members."""
        this = list(self.side(which))
        if remove is not None:
            this.remove(remove)
        this.extend(add)
        other = list(self.side(RIGHT if which == LEFT else LEFT)) + list(add_other)
        return Sequent(this, other) if which == LEFT else Sequent(other, this)

    def rename(self, mapping) -> "Sequent":
        return Sequent(tuple(lf.rename(mapping) for lf in self.left),
                       tuple(lf.rename(mapping) for lf in self.right))

    def multiset(self) -> tuple[Counter, Counter]:
        return Counter(self.left), Counter(self.right)

    def text(self, unicode: bool = False) -> str:
        turnstile = "⊢" if unicode else "|-"
        lhs = ", ".join(lf.text(unicode) for lf in self.left)
        rhs = ", ".join(lf.text(unicode) for lf in self.right)
        return f"{lhs} {turnstile} {rhs}".strip()

    def __str__(self) -> str:
        return self.text()


def _items(parser: Parser, stop: set[str]) -> list[LabeledFormula]:
    out = []
    if parser.peek.kind in stop:
        return out
    while True:
        label = None
        if parser.peek.kind == "ident" and parser.tokens[parser.k + 1].kind == "colon":
            label = parser.resolver.nominal(parser.advance())
            parser.advance()
        out.append(LabeledFormula(label, parser.formula()))
        if parser.peek.kind != "comma":
            return out
        parser.advance()


def parse_sequent(text: str, nominals: Iterable[str] | None = None,
                  props: Iterable[str] | None = None, strict: bool = False) -> Sequent:
    tokens = tokenize(text)
    parser = Parser(tokens, Resolver(tokens, nominals, props, strict))
    left = _items(parser, {"turnstile"})
    parser.expect("turnstile")
    right = _items(parser, {"eof"})
    if parser.peek.kind != "eof":
        raise ParseError(f"unexpected {parser.peek.text!r}", parser.peek.pos)
    return Sequent(left, right)


def parse_labeled(text: str, nominals: Iterable[str] | None = None,
                  props: Iterable[str] | None = None) -> LabeledFormula:
    tokens = tokenize(text)
    parser = Parser(tokens, Resolver(tokens, nominals, props, False))
    items = _items(parser, {"eof"})
    if len(items) != 1 or parser.peek.kind != "eof":
        raise ParseError("expected a single labelled formula")
    return items[0]
