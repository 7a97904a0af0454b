"""The two-player semantic game over a model, solved by backward induction.

Positions are role-tagged claims ``P, w: phi`` (I defend ``phi`` at ``w``),
``O, w: phi`` (I attack it) and the global claims ``P: phi`` / ``O: phi``.
Each position is labelled with the player who chooses the continuation;
at a leaf the label names the winner.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .kripke import Model
from .syntax import (And, At, Box, Dia, Formula, Imp, Neg, Nom, Or, Prop, Rel,
                     parse, to_text)

__all__ = [
    "Role", "Label", "GameState", "Moves", "StrategyTree", "GameSolver",
    "MalformedStrategyError", "moves", "who_wins", "winning_strategy",
    "verify_strategy", "bracket",
]


class Role(Enum):
    P = "P"
    O = "O"

    @property
    def dual(self) -> "Role":
        return Role.O if self is Role.P else Role.P


class Label(Enum):
    """Whose choice a node is; at a leaf, who has won."""

    I = "I"
    Y = "Y"

    @property
    def dual(self) -> "Label":
        return Label.Y if self is Label.I else Label.I


@dataclass(frozen=True, slots=True)
class GameState:
    role: Role
    locus: int | None  # None is the global claim
    formula: Formula

    @property
    def is_global(self) -> bool:
        return self.locus is None


class Moves(NamedTuple):
    mover: Label
    successors: tuple[GameState, ...]

    @property
    def is_leaf(self) -> bool:
        return not self.successors


class MalformedStrategyError(ValueError):
    pass


class GameSolver:
    """Move generator and memoised winner computation for one model.

    ``named`` switches the box, diamond and global rules to their
    formulation over names, which needs a named model: children then range
    over one name per world, or over every assigned nominal when
    ``all_nominals`` is set.
    """

    def __init__(self, model: Model, named: bool = False, all_nominals: bool = False):
        if named and not model.named:
            raise ValueError("the named rules need a named model")
        self.model = model
        self.named = named
        self.all_nominals = all_nominals
        self._winner: dict[tuple, Label] = {}
        if named:
            self._rep = {w: model.names_of(w)[0] for w in range(len(model.worlds))}
            pool = sorted(model.assignment) if all_nominals else \
                [self._rep[w] for w in range(len(model.worlds))]
            self._choices = tuple(pool)

    def moves(self, state: GameState) -> Moves:
        mover, children = self._proponent_moves(state.locus, state.formula)
        if state.role is Role.O:
            mover = mover.dual
            children = tuple(GameState(r.dual, w, f) for r, w, f in children)
        else:
            children = tuple(GameState(r, w, f) for r, w, f in children)
        return Moves(mover, children)

    def _proponent_moves(self, w, phi):
        """Label and children of ``P, w: phi`` as (role, locus, formula) triples."""
        m = self.model
        P, O = Role.P, Role.O
        if w is None:
            if self.named:
                return Label.Y, tuple((P, m.g(i), phi) for i in self._choices)
            return Label.Y, tuple((P, v, phi) for v in range(len(m.worlds)))
        if isinstance(phi, Prop):
            return _leaf(m.holds(phi.name, w))
        if isinstance(phi, Nom):
            return _leaf(m.g(phi.name) == w)
        if isinstance(phi, Rel):
            return _leaf((m.g(phi.src), m.g(phi.dst)) in m.access)
        if isinstance(phi, Or):
            return Label.I, ((P, w, phi.left), (P, w, phi.right))
        if isinstance(phi, And):
            return Label.Y, ((P, w, phi.left), (P, w, phi.right))
        if isinstance(phi, Imp):
            return Label.I, ((O, w, phi.left), (P, w, phi.right))
        if isinstance(phi, Neg):
            return Label.I, ((O, w, phi.body),)
        if isinstance(phi, At):
            return Label.I, ((P, m.g(phi.nominal), phi.body),)
        if isinstance(phi, (Box, Dia)):
            chooser = Label.Y if isinstance(phi, Box) else Label.I
            if self.named:
                i = self._rep[w]
                if isinstance(phi, Box):
                    make = lambda j: Or(Neg(Rel(i, j)), phi.body)  # noqa: E731
                else:
                    make = lambda j: And(Rel(i, j), phi.body)  # noqa: E731
                return chooser, tuple((P, m.g(j), make(j)) for j in self._choices)
            succ = m.successors[w]
            if not succ:
                return chooser.dual, ()
            return chooser, tuple((P, v, phi.body) for v in succ)
        raise TypeError(f"not a formula: {phi!r}")

    def winner(self, state: GameState) -> Label:
        """Label of the player with a winning strategy from ``state``."""
        key = (state.role is Role.P, state.locus, state.formula)
        cached = self._winner.get(key)
        if cached is not None:
            return cached
        mover, children = self.moves(state)
        if children and not any(self.winner(c) is mover for c in children):
            mover = mover.dual
        self._winner[key] = mover
        return mover

    def strategy(self, state: GameState, owner: Label | None = None) -> "StrategyTree":
        """A winning strategy tree for ``owner`` (default: the winner)."""
        if owner is None:
            owner = self.winner(state)
        elif self.winner(state) is not owner:
            raise ValueError(f"{owner.value} has no winning strategy here")
        mover, children = self.moves(state)
        if not children:
            return StrategyTree(state, mover, ())
        if mover is owner:
            pick = next(c for c in children if self.winner(c) is owner)
            return StrategyTree(state, mover, (self.strategy(pick, owner),))
        return StrategyTree(state, mover, tuple(self.strategy(c, owner) for c in children))


def _leaf(true: bool):
    return (Label.I if true else Label.Y), ()


def moves(model: Model, state: GameState, named: bool = False,
          all_nominals: bool = False) -> Moves:
    return GameSolver(model, named, all_nominals).moves(state)


def who_wins(model: Model, state: GameState, named: bool = False,
             all_nominals: bool = False) -> Label:
    return GameSolver(model, named, all_nominals).winner(state)


def winning_strategy(model: Model, state: GameState, named: bool = False,
                     all_nominals: bool = False) -> "StrategyTree":
    return GameSolver(model, named, all_nominals).strategy(state)


# --------------------------------------------------------------------------
# strategy trees

@dataclass(frozen=True)
class StrategyTree:
    state: GameState
    label: Label
    children: tuple["StrategyTree", ...] = ()

    def nodes(self):
        yield self
        for c in self.children:
            yield from c.nodes()

    def leaves(self):
        return [n for n in self.nodes() if not n.children]

    def to_dict(self, model: Model) -> dict:
        s = self.state
        return {
            "state": {
                "role": s.role.value,
                "world": None if s.locus is None else model.worlds[s.locus],
                "formula": to_text(s.formula),
            },
            "label": self.label.value,
            "children": [c.to_dict(model) for c in self.children],
        }

    @classmethod
    def from_dict(cls, model: Model, data: dict) -> "StrategyTree":
        st = data["state"]
        world = st.get("world")
        state = GameState(Role(st["role"]),
                          None if world is None else model.world(world),
                          parse(st["formula"], nominals=model.assignment))
        return cls(state, Label(data["label"]),
                   tuple(cls.from_dict(model, c) for c in data.get("children", [])))

    def to_json(self, model: Model, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(model), indent=indent, ensure_ascii=False)

    def to_dot(self, model: Model, name: str = "strategy") -> str:
        lines = [f"digraph {name} {{", "  node [shape=plaintext];"]
        counter = iter(range(1_000_000))

        def emit(node) -> int:
            me = next(counter)
            text = bracket(model, node.state, node.label).replace('"', '\\"')
            lines.append(f'  n{me} [label="{text}"];')
            for c in node.children:
                lines.append(f"  n{me} -> n{emit(c)};")
            return me

        emit(self)
        lines.append("}")
        return "\n".join(lines)


def bracket(model: Model, state: GameState, label: Label | None = None) -> str:
    """Bracket rendering of a position, e.g. ``[P, w3: ¬□p]^I``."""
    body = to_text(state.formula, unicode=True)
    if state.locus is None:
        inner = f"{state.role.value}: {body}"
    else:
        inner = f"{state.role.value}, {model.worlds[state.locus]}: {body}"
    return f"[{inner}]" + (f"^{label.value}" if label is not None else "")


def verify_strategy(model: Model, tree: StrategyTree, owner: Label,
                    named: bool = False, all_nominals: bool = False) -> bool:
    """Check ``tree`` is a winning strategy for ``owner`` in ``model``.

    Returns False when the tree branches at the owner's turn or reaches a
    leaf the owner loses.  Raises MalformedStrategyError when a child is not
    a legal move, or when an opponent reply is missing from an otherwise
    well-shaped tree.
    """
    solver = GameSolver(model, named, all_nominals)
    ok = True
    missing = None

    def walk(node: StrategyTree):
        nonlocal ok, missing
        mover, succ = solver.moves(node.state)
        if node.label is not mover:
            raise MalformedStrategyError(
                f"{bracket(model, node.state)} is labelled {node.label.value}, "
                f"expected {mover.value}")
        kids = Counter(c.state for c in node.children)
        legal = Counter(succ)
        for k, n in kids.items():
            if k not in legal:
                raise MalformedStrategyError(
                    f"{bracket(model, k)} is not a move from {bracket(model, node.state)}")
            if n > legal[k]:
                raise MalformedStrategyError(f"repeated child under {bracket(model, node.state)}")
        if not succ:
            if mover is not owner:
                ok = False
        elif mover is owner:
            if len(node.children) != 1:
                ok = False
        elif kids != legal and missing is None:
            missing = node.state
        for c in node.children:
            walk(c)

    walk(tree)
    if ok and missing is not None:
        raise MalformedStrategyError(
            f"opponent moves missing under {bracket(model, missing)}")
    return ok
