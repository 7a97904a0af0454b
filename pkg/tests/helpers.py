"""Shared generators for the tests."""

import random

from hybridgames.syntax import And, At, Box, Dia, Imp, Neg, Nom, Or, Prop, Rel

_BINARY = {"and": And, "or": Or, "imp": Imp}
_UNARY = {"neg": Neg, "box": Box, "dia": Dia}


def rand_formula(rng: random.Random, deg: int, props=("p", "q"), noms=("i", "j")):
    """A random formula with exactly ``deg`` connectives."""
    if deg == 0:
        k = rng.randrange(3)
        if k == 0:
            return Prop(rng.choice(props))
        if k == 1:
            return Nom(rng.choice(noms))
        return Rel(rng.choice(noms), rng.choice(noms))
    op = rng.choice(["and", "or", "imp", "neg", "at", "box", "dia"])
    if op in _BINARY:
        a = rng.randrange(deg)
        return _BINARY[op](rand_formula(rng, a, props, noms),
                           rand_formula(rng, deg - 1 - a, props, noms))
    body = rand_formula(rng, deg - 1, props, noms)
    if op == "at":
        return At(rng.choice(noms), body)
    return _UNARY[op](body)


def formulas(seed: int, count: int, max_degree: int, props=("p", "q"), noms=("i", "j")):
    rng = random.Random(seed)
    return [rand_formula(rng, rng.randrange(max_degree + 1), props, noms) for _ in range(count)]


def m1():
    """The five-world example model used throughout the game tests."""
    from hybridgames.kripke import Model
    return Model.build(
        ["w1", "w2", "w3", "w4", "w5"],
        [("w1", "w2"), ("w1", "w3"), ("w3", "w4"), ("w3", "w5")],
        {"p": ["w2", "w4"]},
        {"j": "w2"},
    )


def literal_box_proof(atom: str):
    """Hand-encoded derivation of ``i: [](p & q) |- i: []<atom>``.

    The left branch keeps the left disjunct of ``~R(i,j) | <atom>``, so that
    step is R∨1.
    """
    from hybridgames.calculus import LabeledFormula as LF
    from hybridgames.calculus import ProofTree, RuleId, Sequent
    from hybridgames.syntax import And, Box, Neg, Or, Prop, Rel

    p_and_q = And(Prop("p"), Prop("q"))
    goal_atom = Prop(atom)
    rij = Rel("i", "j")
    target = LF("j", Or(Neg(rij), goal_atom))
    left_dis = LF("j", Or(Neg(rij), p_and_q))
    t = ProofTree
    branch_a = t(Sequent([LF("j", Neg(rij))], [target]), RuleId.R_OR1, target, None, (
        t(Sequent([LF("j", Neg(rij))], [LF("j", Neg(rij))]), RuleId.L_NEG, LF("j", Neg(rij)), None, (
            t(Sequent([], [LF("j", rij), LF("j", Neg(rij))]), RuleId.R_NEG, LF("j", Neg(rij)), None, (
                t(Sequent([LF("j", rij)], [LF("j", rij)]), RuleId.V),)),)),))
    conj_rule = RuleId.L_AND1 if atom == "p" else RuleId.L_AND2
    branch_b = t(Sequent([LF("j", p_and_q)], [target]), conj_rule, LF("j", p_and_q), None, (
        t(Sequent([LF("j", goal_atom)], [target]), RuleId.R_OR2, target, None, (
            t(Sequent([LF("j", goal_atom)], [LF("j", goal_atom)]), RuleId.V),)),))
    box_pq = LF("i", Box(p_and_q))
    return t(Sequent([box_pq], [LF("i", Box(goal_atom))]), RuleId.R_BOX, LF("i", Box(goal_atom)), "j", (
        t(Sequent([box_pq], [target]), RuleId.L_BOX, box_pq, "j", (
            t(Sequent([left_dis], [target]), RuleId.L_OR, left_dis, None, (branch_a, branch_b)),)),))


def literal_k_proof():
    """Hand-encoded derivation of ``|- [](p & q) -> ([]p & []q)``, using the
    derived R→ (CR, R→1, R→2) below R∧ and U."""
    from hybridgames.calculus import LabeledFormula as LF
    from hybridgames.calculus import ProofTree, RuleId, Sequent, derived_r_imp
    from hybridgames.syntax import parse

    phi = parse("[](p & q) -> ([]p & []q)")
    labelled = LF("i", phi)
    conj = LF("i", phi.right)
    r_and = ProofTree(Sequent([LF("i", phi.left)], [conj]), RuleId.R_AND, conj, None,
                      (literal_box_proof("p"), literal_box_proof("q")))
    imp = derived_r_imp(Sequent([], [labelled]), labelled, r_and)
    return ProofTree(Sequent([], [LF(None, phi)]), RuleId.U, LF(None, phi), "i", (imp,))
