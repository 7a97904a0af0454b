"""Command-line entry point.

Exit status:

    0  success
    1  file could not be read
    2  usage or parse error
    3  invalid model, or a formula naming a nominal the model does not assign
    4  proof search gave up (Unknown)
    5  countermodel requested but the goal is provable
"""

from __future__ import annotations

import argparse
import json
import sys

from . import game
from .calculus import (Countermodel, Proof, SearchConfig, Unknown, parse_sequent,
                       prove)
from .game import GameState, Label, Role, bracket
from .kripke import Model, ModelError, UnknownNominalError, evaluate, evaluate_global, oracle_valid
from .play import GameOver, IllegalMoveError, PlaySession, play_step
from .syntax import ParseError, degree, nominals_of, parse, props_of, to_text

EXIT_OK, EXIT_IO, EXIT_PARSE, EXIT_MODEL, EXIT_UNKNOWN, EXIT_PROVABLE = range(6)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _emit(args, data: dict, text: str) -> None:
    if args.json:
        print(json.dumps(data, indent=2, ensure_ascii=False))
    else:
        print(text)


def _load_model(path: str) -> Model:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None
    return Model.from_json(text)


def _goal(text: str):
    if "|-" in text or "⊢" in text:
        return parse_sequent(text)
    return parse(text)


def _model_formula(model: Model, text: str):
    return parse(text, nominals=model.assignment, props=model.valuation)


def _config(args) -> SearchConfig:
    return SearchConfig.from_env(max_steps=args.max_steps, max_fresh_nominals=args.max_fresh)


def _strategy_lines(model, tree, depth=0):
    yield "  " * depth + bracket(model, tree.state, tree.label)
    for child in tree.children:
        yield from _strategy_lines(model, child, depth + 1)


# --------------------------------------------------------------------------
# subcommands

def cmd_parse(args) -> int:
    phi = parse(args.formula)
    _emit(args, {
        "formula": to_text(phi),
        "unicode": to_text(phi, unicode=True),
        "degree": degree(phi),
        "nominals": sorted(nominals_of(phi)),
        "props": sorted(props_of(phi)),
    }, to_text(phi, unicode=args.unicode))
    return EXIT_OK


def cmd_check(args) -> int:
    model = _load_model(args.model)
    phi = _model_formula(model, args.formula)
    if args.world is None:
        value = evaluate_global(model, phi)
        state = GameState(Role.P, None, phi)
    else:
        w = model.world(args.world)
        value = evaluate(model, w, phi)
        state = GameState(Role.P, w, phi)
    tree = game.winning_strategy(model, state)
    if args.dot:
        print(tree.to_dot(model))
        return EXIT_OK
    text = "true" if value else "false"
    if args.strategy:
        owner = "I" if game.who_wins(model, state) is Label.I else "You"
        text += f"\nwinning strategy for {owner}:\n" + "\n".join(_strategy_lines(model, tree))
    _emit(args, {"value": value, "winner": game.who_wins(model, state).value,
                 "strategy": tree.to_dict(model)}, text)
    return EXIT_OK


def _outcome_text(outcome) -> str:
    if isinstance(outcome, Proof):
        return "proof\n" + outcome.tree.pretty()
    if isinstance(outcome, Countermodel):
        return ("countermodel\n" + outcome.model.to_json() + "\nopen branch:\n"
                + "\n".join("  " + s.text(unicode=True) for s in outcome.branch))
    return f"unknown: {outcome.reason} after {outcome.steps} steps"


def cmd_prove(args) -> int:
    outcome = prove(_goal(args.goal), _config(args))
    _emit(args, outcome.to_dict(), _outcome_text(outcome))
    return EXIT_UNKNOWN if isinstance(outcome, Unknown) else EXIT_OK


def cmd_countermodel(args) -> int:
    outcome = prove(_goal(args.goal), _config(args))
    if isinstance(outcome, Countermodel):
        if args.json:
            print(json.dumps(outcome.to_dict(), indent=2, ensure_ascii=False))
        else:
            print(outcome.model.to_json())
        return EXIT_OK
    _emit(args, outcome.to_dict(), _outcome_text(outcome))
    return EXIT_PROVABLE if isinstance(outcome, Proof) else EXIT_UNKNOWN


def cmd_oracle(args) -> int:
    phi = parse(args.formula)
    verdict = oracle_valid(phi, args.max_worlds)
    if verdict:
        _emit(args, {"valid_up_to_bounds": True, "max_worlds": verdict.max_worlds,
                     "models_checked": verdict.models_checked},
              f"valid on all named models with at most {verdict.max_worlds} worlds "
              f"({verdict.models_checked} checked)")
    else:
        m = verdict.model
        _emit(args, {"valid_up_to_bounds": False, "model": m.to_dict(),
                     "world": m.worlds[verdict.world]},
              f"refuted at {m.worlds[verdict.world]} in\n{m.to_json()}")
    return EXIT_OK


def cmd_play(args, stdin=None, out=None) -> int:
    stdin = stdin or sys.stdin
    out = out or sys.stdout
    model = _load_model(args.model)
    phi = _model_formula(model, args.formula)
    role = Role(args.role)
    locus = None if args.world is None else model.world(args.world)
    human = Label(args.human)
    sess = PlaySession(model, GameState(role, locus, phi), human)
    while True:
        mover, options = sess.solver.moves(sess.state)
        print(bracket(model, sess.state, mover), file=out)
        try:
            if mover is human and options:
                for k, option in enumerate(options):
                    print(f"  {k}: {bracket(model, option)}", file=out)
                line = stdin.readline()
                if not line:
                    return EXIT_OK
                try:
                    sess = play_step(sess, int(line.strip()))
                except (ValueError, IllegalMoveError) as exc:
                    print(f"illegal move: {exc}", file=out)
            else:
                sess = play_step(sess)
                if options:
                    print(f"  engine plays {bracket(model, sess.state)}", file=out)
        except GameOver as over:
            print("I win" if over.winner is Label.I else "You win", file=out)
            return EXIT_OK


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hybridgames",
                                 description="Semantic games and the sequent calculus DS "
                                             "for basic hybrid logic.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = common(sub.add_parser("parse", help="parse and pretty-print a formula"))
    p.add_argument("formula")
    p.add_argument("--unicode", action="store_true")
    p.set_defaults(run=cmd_parse)

    p = common(sub.add_parser("check", help="evaluate a formula in a model"))
    p.add_argument("formula")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--world", help="world name; omit for global truth")
    p.add_argument("--strategy", action="store_true", help="print the winning strategy")
    p.add_argument("--dot", action="store_true", help="print the strategy as DOT")
    p.set_defaults(run=cmd_check)

    for name, run, helptext in (("prove", cmd_prove, "search for a DS proof"),
                                ("countermodel", cmd_countermodel,
                                 "print a countermodel from failed proof search")):
        p = common(sub.add_parser(name, help=helptext))
        p.add_argument("goal", help="formula, or sequent such as 'i: []p |- i: p'")
        p.add_argument("--max-steps", type=int)
        p.add_argument("--max-fresh", type=int)
        p.set_defaults(run=run)

    p = common(sub.add_parser("oracle", help="bounded brute-force validity check"))
    p.add_argument("formula")
    p.add_argument("--max-worlds", type=int, default=3)
    p.set_defaults(run=cmd_oracle)

    p = sub.add_parser("play", help="play the semantic game against the engine")
    p.add_argument("formula")
    p.add_argument("--model", required=True)
    p.add_argument("--world", help="omit for the global claim")
    p.add_argument("--role", choices=["P", "O"], default="P")
    p.add_argument("--as", dest="human", choices=["I", "Y"], default="Y",
                   help="the player you control (default: You)")
    p.set_defaults(run=cmd_play)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ModelError, UnknownNominalError) as exc:
        print(f"invalid model: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
