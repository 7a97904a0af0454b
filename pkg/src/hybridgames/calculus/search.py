"""Saturation-based proof search for DS, with countermodels from open branches.

Search runs in two phases.  The first works on branches seen as sets of
labelled formulas: invertible rules fire eagerly, box-left and diamond-right
formulas are instantiated at every known successor of their label while the
principal is retained, and the eigenvariable rules fire once per principal.
A branch closes as soon as its elementary part passes (V).  When every branch
closes, the second phase replays the recorded steps on real multisets and
emits a DS derivation with explicit contractions, which check_proof accepts.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from typing import Union

from ..kripke import Model
from ..syntax import And, At, Box, Dia, Formula, Imp, Neg, Nom, Or, Prop, Rel
from .rules import ProofTree, RuleId, UnionFind, apply_rule, forced, quotient_model
from .sequent import LEFT, RIGHT, LabeledFormula, Sequent

__all__ = [
    "SearchConfig", "Proof", "Countermodel", "Unknown", "SearchOutcome",
    "BranchState", "prove", "extract_countermodel", "GROUPS",
]

GROUPS = ("close", "alpha", "beta", "inst", "eigen")
ENV_MAX_STEPS = "HYBRIDGAMES_MAX_STEPS"
ENV_MAX_FRESH = "HYBRIDGAMES_MAX_FRESH"

# rule recorded for each (side, connective); alpha macros are expanded on emission
_ALPHA = {
    (LEFT, And): RuleId.L_AND1, (RIGHT, Or): RuleId.R_OR1, (RIGHT, Imp): RuleId.R_IMP1,
    (LEFT, Neg): RuleId.L_NEG, (RIGHT, Neg): RuleId.R_NEG,
    (LEFT, At): RuleId.L_AT, (RIGHT, At): RuleId.R_AT,
}
_BETA = {(LEFT, Or): RuleId.L_OR, (RIGHT, And): RuleId.R_AND, (LEFT, Imp): RuleId.L_IMP}
_INST = {(LEFT, Box): RuleId.L_BOX, (RIGHT, Dia): RuleId.R_DIA}
_EIGEN = {(RIGHT, Box): RuleId.R_BOX, (LEFT, Dia): RuleId.L_DIA}
_MACRO = {
    RuleId.L_AND1: (RuleId.CL, RuleId.L_AND1, RuleId.L_AND2),
    RuleId.R_OR1: (RuleId.CR, RuleId.R_OR1, RuleId.R_OR2),
    RuleId.R_IMP1: (RuleId.CR, RuleId.R_IMP1, RuleId.R_IMP2),
}
# how leftover formulas are taken apart at a closed leaf, without contraction
_ABSORB = {
    (LEFT, And): RuleId.L_AND1, (LEFT, Or): RuleId.L_OR, (LEFT, Imp): RuleId.L_IMP,
    (LEFT, Neg): RuleId.L_NEG, (LEFT, At): RuleId.L_AT, (LEFT, Box): RuleId.L_BOX,
    (LEFT, Dia): RuleId.L_DIA,
    (RIGHT, Or): RuleId.R_OR1, (RIGHT, And): RuleId.R_AND, (RIGHT, Imp): RuleId.R_IMP2,
    (RIGHT, Neg): RuleId.R_NEG, (RIGHT, At): RuleId.R_AT, (RIGHT, Box): RuleId.R_BOX,
    (RIGHT, Dia): RuleId.R_DIA,
}


@dataclass(frozen=True)
class SearchConfig:
    """Budget and rule-group priority for prove."""

    max_fresh_nominals: int = 8
    max_steps: int = 10_000
    priority: tuple[str, ...] = GROUPS

    def __post_init__(self):
        if self.max_fresh_nominals < 1 or self.max_steps < 1:
            raise ValueError("search budget must allow at least one step and one fresh nominal")
        object.__setattr__(self, "priority", tuple(self.priority))
        if sorted(self.priority) != sorted(GROUPS):
            raise ValueError(f"priority must order exactly the groups {', '.join(GROUPS)}")

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "SearchConfig":
        env = os.environ if environ is None else environ
        kwargs = {}
        if ENV_MAX_STEPS in env:
            kwargs["max_steps"] = int(env[ENV_MAX_STEPS])
        if ENV_MAX_FRESH in env:
            kwargs["max_fresh_nominals"] = int(env[ENV_MAX_FRESH])
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)


@dataclass(frozen=True)
class Proof:
    tree: ProofTree
    steps: int

    def to_dict(self) -> dict:
        return {"result": "proof", "steps": self.steps,
                "nominals": sorted(self.tree.nominals()), "proof": self.tree.to_dict()}


@dataclass(frozen=True)
class Countermodel:
    model: Model
    branch: tuple[Sequent, ...]
    steps: int
    state: "BranchState" = field(default=None, compare=False, repr=False)

    def to_dict(self) -> dict:
        return {"result": "countermodel", "steps": self.steps,
                "model": self.model.to_dict(), "branch": [s.text() for s in self.branch]}


@dataclass(frozen=True)
class Unknown:
    steps: int
    fresh_nominals: int
    reason: str

    def to_dict(self) -> dict:
        return {"result": "unknown", "steps": self.steps,
                "fresh_nominals": self.fresh_nominals, "reason": self.reason}


SearchOutcome = Union[Proof, Countermodel, Unknown]


@dataclass(eq=False)
class Step:
    """One recorded rule application of the first phase."""

    rule: RuleId
    principal: LabeledFormula | None = None
    witness: str | None = None
    next: list["Step"] = field(default_factory=list)
    keep: bool = False  # instantiation whose principal is used again above


class BranchState:
    """A branch of the first phase, viewed as two sets of labelled formulas.

    Keeps ``≈`` as a union-find over the branch nominals, the elementary left
    facts, the processed principals and, for each box-left or diamond-right
    principal, the witnesses it has been instantiated at.
    """

    def __init__(self, seq: Sequent):
        self.left: dict[LabeledFormula, None] = {}
        self.right: dict[LabeledFormula, None] = {}
        self.done: set[tuple[str, LabeledFormula]] = set()
        self.instances: dict[LabeledFormula, list[str]] = {}
        self.uf = UnionFind(seq.nominals())
        self.props: list[tuple[str, str]] = []
        self.rels: list[tuple[str, str]] = []
        self.fresh = 0
        self.log: list[tuple[bool, str, LabeledFormula] | None] = []
        self.saturated = False
        for lf in seq.left:
            self.add(LEFT, lf)
        for lf in seq.right:
            self.add(RIGHT, lf)
        self.log.append(None)

    def copy(self) -> "BranchState":
        new = object.__new__(BranchState)
        new.left = dict(self.left)
        new.right = dict(self.right)
        new.done = set(self.done)
        new.instances = {k: list(v) for k, v in self.instances.items()}
        new.uf = self.uf.copy()
        new.props = list(self.props)
        new.rels = list(self.rels)
        new.fresh = self.fresh
        new.log = list(self.log)
        new.saturated = False
        return new

    def side(self, which: str) -> dict[LabeledFormula, None]:
        return self.left if which == LEFT else self.right

    def add(self, which: str, lf: LabeledFormula) -> bool:
        members = self.side(which)
        if lf in members or (which, lf) in self.done:
            return False
        members[lf] = None
        self.log.append((True, which, lf))
        for n in lf.nominals():
            self.uf.add(n)
        if which == LEFT and lf.label is not None:
            phi = lf.formula
            if isinstance(phi, Rel):
                self.rels.append((phi.src, phi.dst))
            elif isinstance(phi, Nom):
                self.uf.union(lf.label, phi.name)
            elif isinstance(phi, Prop):
                self.props.append((lf.label, phi.name))
        return True

    def consume(self, which: str, lf: LabeledFormula) -> None:
        del self.side(which)[lf]
        self.done.add((which, lf))
        self.log.append((False, which, lf))

    def facts(self):
        find = self.uf.find
        return ({(find(i), p) for i, p in self.props},
                {(find(a), find(b)) for a, b in self.rels})

    def closed(self) -> bool:
        props, rels = self.facts()
        return any(forced(lf, self.uf, props, rels) for lf in self.right if lf.elementary)

    def nominals(self) -> list[str]:
        return sorted(self.uf.parent)

    def trace(self) -> list[Sequent]:
        """The branch as a list of sequents, one per recorded step."""
        left: dict = {}
        right: dict = {}
        out = []
        for event in self.log:
            if event is None:
                out.append(Sequent(tuple(left), tuple(right)))
                continue
            added, which, lf = event
            members = left if which == LEFT else right
            if added:
                members[lf] = None
            else:
                del members[lf]
        return out

    def history(self) -> tuple[list[LabeledFormula], list[LabeledFormula]]:
        """Every labelled formula that was ever on the branch, by side."""
        left: dict = {}
        right: dict = {}
        for event in self.log:
            if event is not None and event[0]:
                (left if event[1] == LEFT else right)[event[2]] = None
        return list(left), list(right)

    # candidate principals, one group at a time

    def _first(self, table):
        for which in (LEFT, RIGHT):
            for lf in self.side(which):
                rule = table.get((which, type(lf.formula)))
                if rule is not None:
                    return rule, lf, None
        return None

    def _instance(self):
        find = self.uf.find
        for which in (LEFT, RIGHT):
            for lf in self.side(which):
                rule = _INST.get((which, type(lf.formula)))
                if rule is None:
                    continue
                here = find(lf.label)
                used = {find(w) for w in self.instances.get(lf, ())}
                for a, b in self.rels:
                    if find(a) == here and find(b) not in used:
                        return rule, lf, b
        return None

    def candidate(self, group: str):
        if group == "alpha":
            return self._first(_ALPHA)
        if group == "beta":
            return self._first(_BETA)
        if group == "inst":
            return self._instance()
        if group == "eigen":
            return self._first(_EIGEN)
        raise ValueError(group)


def _instance_member(rule: RuleId, lf: LabeledFormula, j: str) -> LabeledFormula:
    i, body = lf.label, lf.formula.body
    if rule in (RuleId.L_BOX, RuleId.R_BOX):
        return LabeledFormula(j, Or(Neg(Rel(i, j)), body))
    return LabeledFormula(j, And(Rel(i, j), body))


def _expand(branch: BranchState, rule: RuleId, lf: LabeledFormula) -> None:
    """Apply a single-premise alpha rule to the set view of the branch."""
    i, phi = lf.label, lf.formula
    which = rule.side
    branch.consume(which, lf)
    if rule is RuleId.L_AND1:
        branch.add(LEFT, LabeledFormula(i, phi.left))
        branch.add(LEFT, LabeledFormula(i, phi.right))
    elif rule is RuleId.R_OR1:
        branch.add(RIGHT, LabeledFormula(i, phi.left))
        branch.add(RIGHT, LabeledFormula(i, phi.right))
    elif rule is RuleId.R_IMP1:
        branch.add(LEFT, LabeledFormula(i, phi.left))
        branch.add(RIGHT, LabeledFormula(i, phi.right))
    elif rule in (RuleId.L_NEG, RuleId.R_NEG):
        branch.add(RIGHT if which == LEFT else LEFT, LabeledFormula(i, phi.body))
    else:
        branch.add(which, LabeledFormula(phi.nominal, phi.body))


def _split(branch: BranchState, rule: RuleId, lf: LabeledFormula) -> list[BranchState]:
    i, phi = lf.label, lf.formula
    kids = [branch.copy(), branch.copy()]
    for kid in kids:
        kid.consume(rule.side, lf)
    if rule is RuleId.L_OR:
        kids[0].add(LEFT, LabeledFormula(i, phi.left))
        kids[1].add(LEFT, LabeledFormula(i, phi.right))
    elif rule is RuleId.R_AND:
        kids[0].add(RIGHT, LabeledFormula(i, phi.left))
        kids[1].add(RIGHT, LabeledFormula(i, phi.right))
    else:
        kids[0].add(RIGHT, LabeledFormula(i, phi.left))
        kids[1].add(LEFT, LabeledFormula(i, phi.right))
    for kid in kids:
        kid.log.append(None)
    return kids


class _Search:
    def __init__(self, goal: Sequent, config: SearchConfig):
        self.goal = goal
        self.config = config
        self.steps = 0
        self.max_fresh_seen = 0
        self.avoid = set(goal.nominals())
        self.counter = 0

    def fresh_name(self) -> str:
        while True:
            self.counter += 1
            name = f"n{self.counter}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name

    # first phase

    def run(self, branch: BranchState):
        """Expand ``branch``; returns ("closed", Step), ("open", branch) or ("unknown", why)."""
        head = Step(RuleId.V)
        tail = head  # dummy; the real first step is head.next[0]
        while True:
            if self.steps >= self.config.max_steps:
                return "unknown", f"step budget of {self.config.max_steps} exhausted"
            picked = None
            for group in self.config.priority:
                if group == "close":
                    if branch.closed():
                        picked = "close"
                        break
                    continue
                picked = branch.candidate(group)
                if picked is not None:
                    break
            if picked is None:
                branch.saturated = True
                return "open", branch
            self.steps += 1
            if picked == "close":
                tail.next = [Step(RuleId.V)]
                return "closed", head.next[0]
            rule, lf, witness = picked
            if rule in (RuleId.L_OR, RuleId.R_AND, RuleId.L_IMP):
                step = Step(rule, lf)
                tail.next = [step]
                outcomes = []
                for kid in _split(branch, rule, lf):
                    outcome = self.run(kid)
                    if outcome[0] == "open":
                        return outcome
                    outcomes.append(outcome)
                for status, payload in outcomes:
                    if status == "unknown":
                        return status, payload
                step.next = [payload for _, payload in outcomes]
                return "closed", head.next[0]
            if rule in _INST.values():
                branch.instances.setdefault(lf, []).append(witness)
                branch.add(rule.side, _instance_member(rule, lf, witness))
            elif rule in _EIGEN.values():
                if branch.fresh >= self.config.max_fresh_nominals:
                    return "unknown", (f"fresh nominal budget of "
                                       f"{self.config.max_fresh_nominals} exhausted")
                witness = self.fresh_name()
                branch.fresh += 1
                self.max_fresh_seen = max(self.max_fresh_seen, branch.fresh)
                branch.consume(rule.side, lf)
                branch.add(rule.side, _instance_member(rule, lf, witness))
            else:
                _expand(branch, rule, lf)
            branch.log.append(None)
            step = Step(rule, lf, witness)
            tail.next = [step]
            tail = step

    # second phase

    def emit(self, seq: Sequent, step: Step) -> ProofTree:
        rule, lf = step.rule, step.principal
        if rule is RuleId.V:
            return self.absorb(seq)
        if rule in _MACRO:
            chain = _MACRO[rule]
            seqs = [seq]
            for r in chain:
                (nxt,) = apply_rule(seqs[-1], r, lf)
                seqs.append(nxt)
            node = self.emit(seqs[-1], step.next[0])
            for r, s in zip(reversed(chain), reversed(seqs[:-1])):
                node = ProofTree(s, r, lf, None, (node,))
            return node
        if rule in _INST.values() and step.keep:
            contraction = RuleId.CL if rule is RuleId.L_BOX else RuleId.CR
            (copied,) = apply_rule(seq, contraction, lf)
            inner = self.emit_single(copied, step)
            return ProofTree(seq, contraction, lf, None, (inner,))
        return self.emit_single(seq, step)

    def emit_single(self, seq: Sequent, step: Step) -> ProofTree:
        premises = apply_rule(seq, step.rule, step.principal, step.witness)
        kids = tuple(self.emit(p, s) for p, s in zip(premises, step.next))
        return ProofTree(seq, step.rule, step.principal, step.witness, kids)

    def absorb(self, seq: Sequent) -> ProofTree:
        """Close a leaf whose elementary part is valid, taking apart the rest."""
        for which in (LEFT, RIGHT):
            for lf in seq.side(which):
                if lf.elementary:
                    continue
                rule = _ABSORB[(which, type(lf.formula))]
                witness = None
                if rule in _INST.values():
                    witness = lf.label
                elif rule in _EIGEN.values():
                    witness = self.fresh_name()
                premises = apply_rule(seq, rule, lf, witness)
                return ProofTree(seq, rule, lf, witness,
                                 tuple(self.absorb(p) for p in premises))
        return ProofTree(seq, RuleId.V)


def _mark_reuse(root: Step) -> None:
    """Set ``keep`` on instantiations whose principal is instantiated again above."""
    order = []
    stack = [root]
    while stack:
        step = stack.pop()
        order.append(step)
        stack.extend(step.next)
    used: dict[int, frozenset] = {}
    for step in reversed(order):
        above = frozenset().union(*(used[id(s)] for s in step.next))
        step.keep = step.rule in _INST.values() and step.principal in above
        own = {step.principal} if step.rule in _INST.values() else set()
        used[id(step)] = above | own


def _goal_sequent(goal: Formula | Sequent) -> Sequent:
    if isinstance(goal, Sequent):
        if not goal.labelled and (goal.left or len(goal.right) != 1):
            raise ValueError("an unlabelled formula may only appear as the bare goal ⊢ φ")
        return goal
    return Sequent((), (LabeledFormula(None, goal),))


def prove(goal: Formula | Sequent, config: SearchConfig | None = None) -> SearchOutcome:
    """Search for a DS proof of ``goal``; a bare formula ``φ`` means ``⊢ φ``."""
    config = config or SearchConfig()
    root = _goal_sequent(goal)
    search = _Search(root, config)
    labelled = root
    u_step = None
    if not root.labelled:
        (lf,) = root.right
        u_step = Step(RuleId.U, lf, search.fresh_name())
        (labelled,) = apply_rule(root, RuleId.U, lf, u_step.witness)
    branch = BranchState(labelled)
    if u_step is not None:
        branch.fresh = search.max_fresh_seen = 1
    status, payload = search.run(branch)
    if status == "unknown":
        return Unknown(search.steps, search.max_fresh_seen, payload)
    if status == "open":
        return Countermodel(extract_countermodel(payload), tuple(payload.trace()),
                            search.steps, payload)
    if u_step is not None:
        u_step.next = [payload]
        payload = u_step
    _mark_reuse(payload)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * search.steps + 1000))
    try:
        tree = search.emit(root, payload)
    finally:
        sys.setrecursionlimit(limit)
    return Proof(tree, search.steps)


def extract_countermodel(branch: BranchState) -> Model:
    """The model of ``≈``-classes of branch nominals built from the left facts."""
    if not branch.saturated:
        raise ValueError("branch is not saturated")
    if branch.closed():
        raise ValueError("branch is closed")
    props, rels = branch.facts()
    return quotient_model(branch.nominals(), branch.uf.copy(), props, rels)
