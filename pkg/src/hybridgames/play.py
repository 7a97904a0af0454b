"""Playing the semantic game against the optimal engine, one ply at a time."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .game import GameSolver, GameState, Label
from .kripke import Model

__all__ = ["PlaySession", "play_step", "GameOver", "IllegalMoveError", "new_session"]


class GameOver(Exception):
    def __init__(self, winner: Label):
        self.winner = winner
        who = "I" if winner is Label.I else "You"
        super().__init__(f"game over: {who} won")


class IllegalMoveError(ValueError):
    pass


@dataclass(frozen=True)
class PlaySession:
    """A game in progress; ``human`` is the player the user controls."""

    model: Model
    state: GameState
    human: Label
    history: tuple[GameState, ...] = ()
    solver: GameSolver = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.solver is None:
            object.__setattr__(self, "solver", GameSolver(self.model))

    @property
    def turn(self) -> Label:
        return self.solver.moves(self.state).mover

    @property
    def options(self) -> tuple[GameState, ...]:
        return self.solver.moves(self.state).successors

    @property
    def over(self) -> bool:
        return not self.options

    @property
    def winner(self) -> Label | None:
        """The leaf label once the game is over."""
        return self.turn if self.over else None


def new_session(model: Model, state: GameState, human: Label) -> PlaySession:
    return PlaySession(model, state, human)


def play_step(sess: PlaySession, choice: int | None = None) -> PlaySession:
    """Advance one ply.  ``choice`` indexes the options on the human's turn
    and must be None on the engine's turn."""
    mover, options = sess.solver.moves(sess.state)
    if not options:
        raise GameOver(mover)
    if mover is sess.human:
        if choice is None or not 0 <= choice < len(options):
            raise IllegalMoveError(f"choose a move between 0 and {len(options) - 1}")
        nxt = options[choice]
    else:
        if choice is not None:
            raise IllegalMoveError("it is the engine's turn")
        nxt = next((c for c in options if sess.solver.winner(c) is mover), options[0])
    return replace(sess, state=nxt, history=sess.history + (sess.state,))
