"""The eight acceptance criteria, each at its stated tolerance.

Every test records a one-line verdict through the ``report`` fixture; the
lines are repeated in the terminal summary.
"""

import itertools
import random
import time
from functools import cache

from helpers import formulas, literal_k_proof, m1, rand_formula
from hybridgames.calculus import (Countermodel, LabeledFormula, Proof, ProofTree, RuleId,
                                  Sequent, check_proof, elementary_valid, parse_sequent, prove)
from hybridgames.game import GameSolver, GameState, Label, Role, bracket, verify_strategy
from hybridgames.kripke import (ValidUpToBounds, count_models, enumerate_models, evaluate,
                                evaluate_global, oracle_valid)
from hybridgames.syntax import Nom, Prop, Rel, parse

PROPS, NOMS = ("p", "q"), ("i", "j")


@cache
def adequacy_run():
    """One pass over the criterion 1/2 population, counting discrepancies."""
    start = time.perf_counter()
    expected = count_models(2, PROPS, NOMS)
    models = list(enumerate_models(2, PROPS, NOMS))
    population = formulas(seed=2024, count=500, max_degree=6)
    adequacy = exclusivity = 0
    for m in models:
        solver = GameSolver(m)
        for phi in population:
            for w in range(len(m.worlds)):
                truth = evaluate(m, w, phi)
                p_wins = solver.winner(GameState(Role.P, w, phi)) is Label.I
                o_wins = solver.winner(GameState(Role.O, w, phi)) is Label.I
                adequacy += (p_wins != truth) + (o_wins == truth)
                exclusivity += p_wins == o_wins
            global_wins = solver.winner(GameState(Role.P, None, phi)) is Label.I
            adequacy += global_wins != evaluate_global(m, phi)
    elapsed = time.perf_counter() - start
    return expected, len(models), len(population), adequacy, exclusivity, elapsed


def test_criterion_1_adequacy(report):
    expected, n_models, n_formulas, bad, _, elapsed = adequacy_run()
    ok = n_models == expected == 520 and n_formulas >= 500 and bad == 0 and elapsed < 60
    report(1, ok, f"{n_models} models (closed form {expected}), {n_formulas} formulas, "
                  f"{bad} discrepancies, {elapsed:.1f}s")
    assert ok


def test_criterion_2_exclusivity(report):
    _, n_models, n_formulas, _, bad, _ = adequacy_run()
    ok = bad == 0
    report(2, ok, f"{n_models} models x {n_formulas} formulas, {bad} discrepancies")
    assert ok


def test_criterion_3_golden_game(report):
    m = m1()
    root = GameState(Role.P, m.world("w1"), parse("[](j | ~[]p)", nominals=["j"]))
    solver = GameSolver(m)
    tree = solver.strategy(root)
    leaves = {bracket(m, leaf.state) for leaf in tree.leaves()}
    ok = (solver.winner(root) is Label.I
          and verify_strategy(m, tree, Label.I)
          and len(tree.children) == 2
          and leaves == {"[P, w2: j]", "[O, w5: p]"})
    report(3, ok, f"winner {solver.winner(root).value}, leaves {sorted(leaves)}")
    assert ok


def test_criterion_4_golden_proofs(report):
    goals = {
        "|- p | ~p": parse("p | ~p"),
        "|- [](p & q) -> ([]p & []q)": parse("[](p & q) -> ([]p & []q)"),
        "i: [](p & q) |- i: []p": parse_sequent("i: [](p & q) |- i: []p"),
    }
    verdicts = {}
    for name, goal in goals.items():
        outcome = prove(goal)
        verdicts[name] = isinstance(outcome, Proof) and bool(check_proof(outcome.tree))
    literal = literal_k_proof()
    verdicts["literal derivation"] = bool(check_proof(literal)) and \
        {RuleId.CR, RuleId.R_IMP1, RuleId.R_IMP2} <= literal.rules_used()
    ok = all(verdicts.values())
    report(4, ok, ", ".join(f"{k}: {'ok' if v else 'FAILED'}" for k, v in verdicts.items()))
    assert ok


@cache
def countermodel_population():
    """Random formulas of degree <= 4 until 200 are refuted within 3 worlds."""
    rng = random.Random(77)
    rows = []
    refuted = 0
    while refuted < 200:
        phi = rand_formula(rng, rng.randrange(5), PROPS, NOMS)
        verdict = oracle_valid(phi, 3)
        outcome = prove(phi)
        rows.append((phi, verdict, outcome))
        refuted += not verdict
    return rows


def test_criterion_5_countermodels(report):
    rows = [r for r in countermodel_population() if not r[1]]
    proofs = sum(isinstance(o, Proof) for _, _, o in rows)
    models = [(phi, o) for phi, _, o in rows if isinstance(o, Countermodel)]
    wrong = sum(evaluate_global(o.model, phi) for phi, o in models)
    share = len(models) / len(rows)
    ok = len(rows) >= 200 and proofs == 0 and wrong == 0 and share >= 0.9
    report(5, ok, f"{len(rows)} refuted formulas, {proofs} proofs, {len(models)} countermodels "
                  f"({share:.0%}), {wrong} not falsifying")
    assert ok


def test_criterion_6_oracle_agreement(report):
    rows = countermodel_population()
    proved = [(phi, v) for phi, v, o in rows if isinstance(o, Proof)]
    violations = sum(not isinstance(v, ValidUpToBounds) or v.max_worlds != 3 for _, v in proved)
    ok = violations == 0
    report(6, ok, f"{len(rows)} formulas, {len(proved)} proved, {violations} violations")
    assert ok


def _mutations(tree: ProofTree):
    """Copies of ``tree`` with one eigenvariable renamed to a nominal of its conclusion."""
    def walk(node, rebuild):
        if node.rule in (RuleId.U, RuleId.R_BOX, RuleId.L_DIA):
            for clash in sorted(node.conclusion.nominals()):
                renamed = ProofTree(node.conclusion, node.rule, node.principal, clash,
                                    tuple(p.rename({node.witness: clash}) for p in node.premises))
                yield rebuild(renamed)
        for k, child in enumerate(node.premises):
            def inner(new, node=node, k=k):
                kids = node.premises[:k] + (new,) + node.premises[k + 1:]
                return rebuild(ProofTree(node.conclusion, node.rule, node.principal,
                                         node.witness, kids))
            yield from walk(child, inner)
    yield from walk(tree, lambda t: t)


def test_criterion_7_eigenvariables(report):
    sources = [literal_k_proof()]
    rng = random.Random(5)
    while len(sources) < 40:
        outcome = prove(rand_formula(rng, rng.randrange(2, 6), PROPS, NOMS))
        if isinstance(outcome, Proof):
            sources.append(outcome.tree)
    mutated = list(itertools.islice(
        (m for tree in sources for m in _mutations(tree)), 100))
    results = [check_proof(t) for t in mutated]
    rejected = sum(not r and r.kind == "eigenvariable" for r in results)
    ok = len(mutated) == 100 and rejected == 100
    report(7, ok, f"{len(mutated)} mutated proofs, {rejected} rejected with the "
                  f"eigenvariable diagnostic")
    assert ok


def test_criterion_8_elementary_valid(report):
    atoms = [LabeledFormula(label, f) for label in NOMS
             for f in [Prop("p"), Nom("i"), Nom("j")] + [Rel(a, b) for a in NOMS for b in NOMS]]
    slots = [(side, a) for side in ("left", "right") for a in atoms]
    models = list(enumerate_models(2, {"p"}, NOMS))

    def brute(s: Sequent) -> bool:
        def at(m, lf):
            return evaluate(m, m.g(lf.label), lf.formula)
        return not any(all(at(m, lf) for lf in s.left) and not any(at(m, lf) for lf in s.right)
                       for m in models)

    checked = bad = 0
    for size in range(4):
        for combo in itertools.combinations_with_replacement(slots, size):
            s = Sequent([a for side, a in combo if side == "left"],
                        [a for side, a in combo if side == "right"])
            checked += 1
            bad += elementary_valid(s) != brute(s)
    ok = bad == 0
    report(8, ok, f"{checked} sequents against {len(models)} models, {bad} discrepancies")
    assert ok
