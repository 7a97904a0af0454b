"""Hybrid modal logic: semantic games, the sequent calculus DS and a brute-force oracle."""

from .game import GameState, Label, Role, verify_strategy, who_wins, winning_strategy
from .kripke import Model, enumerate_models, evaluate, evaluate_global, oracle_valid
from .syntax import parse, to_text

__all__ = [
    "GameState", "Label", "Role", "verify_strategy", "who_wins", "winning_strategy",
    "Model", "enumerate_models", "evaluate", "evaluate_global", "oracle_valid",
    "parse", "to_text",
]
