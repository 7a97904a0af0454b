"""The rules of DS, the (V) decision procedure, proof trees and the checker."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from ..kripke import Model
from ..syntax import And, At, Box, Dia, Imp, Neg, Nom, Or, Prop, Rel, fresh_nominals
from .sequent import LEFT, RIGHT, LabeledFormula, Sequent, parse_labeled, parse_sequent

__all__ = [
    "RuleId", "RuleError", "RuleShapeError", "EigenvariableError", "UnionFind",
    "elementary_valid", "elementary_countermodel", "apply_rule", "ProofTree",
    "CheckResult", "check_proof", "derived_r_imp",
]


class RuleId(Enum):
    V = "V"
    CL = "CL"
    CR = "CR"
    U = "U"
    L_OR = "L∨"
    R_OR1 = "R∨1"
    R_OR2 = "R∨2"
    L_AND1 = "L∧1"
    L_AND2 = "L∧2"
    R_AND = "R∧"
    L_IMP = "L→"
    R_IMP1 = "R→1"
    R_IMP2 = "R→2"
    L_NEG = "L¬"
    R_NEG = "R¬"
    L_BOX = "L□"
    R_BOX = "R□"
    L_DIA = "L◇"
    R_DIA = "R◇"
    L_AT = "L@"
    R_AT = "R@"

    @classmethod
    def parse(cls, name: str) -> "RuleId":
        """Accept the symbolic tag (``L∨``) or the member name (``L_OR``)."""
        try:
            return cls(name)
        except ValueError:
            try:
                return cls[name.upper()]
            except KeyError:
                raise ValueError(f"unknown rule {name!r}") from None

    @property
    def side(self) -> str | None:
        """The side the principal formula sits on, None for V."""
        if self is RuleId.V:
            return None
        if self in (RuleId.CL,) or self.name.startswith("L_"):
            return LEFT
        return RIGHT

    @property
    def arity(self) -> int:
        if self is RuleId.V:
            return 0
        return 2 if self in (RuleId.L_OR, RuleId.R_AND, RuleId.L_IMP) else 1


# shape each rule expects of its principal formula
_SHAPE = {
    RuleId.L_OR: Or, RuleId.R_OR1: Or, RuleId.R_OR2: Or,
    RuleId.L_AND1: And, RuleId.L_AND2: And, RuleId.R_AND: And,
    RuleId.L_IMP: Imp, RuleId.R_IMP1: Imp, RuleId.R_IMP2: Imp,
    RuleId.L_NEG: Neg, RuleId.R_NEG: Neg,
    RuleId.L_BOX: Box, RuleId.R_BOX: Box, RuleId.L_DIA: Dia, RuleId.R_DIA: Dia,
    RuleId.L_AT: At, RuleId.R_AT: At,
}
EIGENVARIABLE_RULES = frozenset({RuleId.U, RuleId.R_BOX, RuleId.L_DIA})
INSTANCE_RULES = frozenset({RuleId.L_BOX, RuleId.R_DIA})


class RuleError(ValueError):
    kind = "shape"


class RuleShapeError(RuleError):
    pass


class EigenvariableError(RuleError):
    kind = "eigenvariable"


class UnionFind:
    def __init__(self, items=()):
        self.parent: dict[str, str] = {}
        for x in items:
            self.add(x)

    def add(self, x: str) -> None:
        self.parent.setdefault(x, x)

    def find(self, x: str) -> str:
        self.add(x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # keep the smaller name as representative, for stable world names
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def classes(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for x in sorted(self.parent):
            out.setdefault(self.find(x), []).append(x)
        return out

    def copy(self) -> "UnionFind":
        uf = UnionFind()
        uf.parent = dict(self.parent)
        return uf


# --------------------------------------------------------------------------
# the (V) rule

def _check_elementary(s: Sequent) -> None:
    if not s.labelled:
        raise RuleShapeError("unlabelled member in an elementary sequent")
    if not s.elementary:
        raise RuleShapeError("sequent is not elementary")


def _facts(left):
    """Union-find and the p- and R-facts of an elementary left side."""
    uf = UnionFind()
    for lf in left:
        uf.add(lf.label)
        if isinstance(lf.formula, Nom):
            uf.union(lf.label, lf.formula.name)
        elif isinstance(lf.formula, Rel):
            uf.add(lf.formula.src)
            uf.add(lf.formula.dst)
    props = {(uf.find(lf.label), lf.formula.name) for lf in left if isinstance(lf.formula, Prop)}
    rels = {(uf.find(lf.formula.src), uf.find(lf.formula.dst))
            for lf in left if isinstance(lf.formula, Rel)}
    return uf, props, rels


def forced(lf: LabeledFormula, uf: UnionFind, props, rels) -> bool:
    """Is the right-side elementary member ``lf`` made true by the facts?"""
    phi = lf.formula
    if isinstance(phi, Prop):
        return (uf.find(lf.label), phi.name) in props
    if isinstance(phi, Nom):
        return uf.find(lf.label) == uf.find(phi.name)
    return (uf.find(phi.src), uf.find(phi.dst)) in rels


def elementary_valid(s: Sequent) -> bool:
    """Decide an elementary sequent by congruence closure over its left side."""
    _check_elementary(s)
    uf, props, rels = _facts(s.left)
    return any(forced(lf, uf, props, rels) for lf in s.right)


def quotient_model(nominals, uf: UnionFind, props, rels) -> Model:
    """The model whose worlds are the classes of ``uf`` over ``nominals``."""
    for n in nominals:
        uf.add(n)
    classes = uf.classes()
    if not classes:
        uf.add(fresh_nominals((), 1)[0])
        classes = uf.classes()
    reps = sorted(classes)
    index = {r: k for k, r in enumerate(reps)}
    valuation: dict[str, set[int]] = {}
    for rep, p in props:
        valuation.setdefault(p, set()).add(index[rep])
    return Model(
        worlds=tuple(f"[{r}]" for r in reps),
        access=frozenset((index[a], index[b]) for a, b in rels),
        valuation={p: frozenset(ws) for p, ws in valuation.items()},
        assignment={n: index[uf.find(n)] for n in uf.parent},
    )


def elementary_countermodel(s: Sequent) -> Model | None:
    """A named model falsifying ``s`` at its labels, or None when valid."""
    _check_elementary(s)
    uf, props, rels = _facts(s.left)
    if any(forced(lf, uf, props, rels) for lf in s.right):
        return None
    return quotient_model(s.nominals(), uf, props, rels)


# --------------------------------------------------------------------------
# rule application

def _need_witness(rule, witness):
    if witness is None:
        raise RuleShapeError(f"{rule.value} needs a witness nominal")


def apply_rule(s: Sequent, rule: RuleId, principal: LabeledFormula | None = None,
               witness: str | None = None) -> list[Sequent]:
    """Premises of ``s`` under ``rule``, reading the rule bottom-up."""
    if rule is RuleId.V:
        if principal is not None or witness is not None:
            raise RuleShapeError("V takes no principal or witness")
        if not elementary_valid(s):
            raise RuleShapeError("elementary sequent is not valid")
        return []
    if principal is None:
        raise RuleShapeError(f"{rule.value} needs a principal formula")
    side = rule.side
    if principal not in s.side(side):
        raise RuleShapeError(f"{principal} is not on the {side} of the sequent")

    if rule is RuleId.U:
        if principal.label is not None:
            raise RuleShapeError("U applies to an unlabelled goal")
        if s.left or len(s.right) != 1:
            raise RuleShapeError("U needs the bare goal ⊢ φ")
        _need_witness(rule, witness)
        if witness in s.nominals():
            raise EigenvariableError(f"{witness} occurs in the lower sequent")
        return [Sequent((), (LabeledFormula(witness, principal.formula),))]
    if principal.label is None:
        raise RuleShapeError("only U applies to an unlabelled formula")

    i, phi = principal.label, principal.formula
    if rule in (RuleId.CL, RuleId.CR):
        if witness is not None:
            raise RuleShapeError("contraction takes no witness")
        return [s.replace(side, None, (principal,))]

    expected = _SHAPE[rule]
    if not isinstance(phi, expected):
        raise RuleShapeError(f"{rule.value} expects a {expected.__name__} formula, got {phi}")
    if rule in EIGENVARIABLE_RULES | INSTANCE_RULES:
        _need_witness(rule, witness)
        if rule in EIGENVARIABLE_RULES and witness in s.nominals():
            raise EigenvariableError(f"{witness} occurs in the lower sequent")
    elif witness is not None:
        raise RuleShapeError(f"{rule.value} takes no witness")

    lab = lambda f, n=i: LabeledFormula(n, f)  # noqa: E731
    drop = s.replace  # drop the principal, add new members
    if rule is RuleId.L_OR:
        return [drop(LEFT, principal, (lab(phi.left),)), drop(LEFT, principal, (lab(phi.right),))]
    if rule is RuleId.R_AND:
        return [drop(RIGHT, principal, (lab(phi.left),)),
                drop(RIGHT, principal, (lab(phi.right),))]
    if rule is RuleId.L_IMP:
        return [drop(LEFT, principal, (), (lab(phi.left),)),
                drop(LEFT, principal, (lab(phi.right),))]
    if rule is RuleId.R_OR1:
        return [drop(RIGHT, principal, (lab(phi.left),))]
    if rule is RuleId.R_OR2:
        return [drop(RIGHT, principal, (lab(phi.right),))]
    if rule is RuleId.L_AND1:
        return [drop(LEFT, principal, (lab(phi.left),))]
    if rule is RuleId.L_AND2:
        return [drop(LEFT, principal, (lab(phi.right),))]
    if rule is RuleId.R_IMP1:
        return [drop(RIGHT, principal, (), (lab(phi.left),))]
    if rule is RuleId.R_IMP2:
        return [drop(RIGHT, principal, (lab(phi.right),))]
    if rule is RuleId.L_NEG:
        return [drop(LEFT, principal, (), (lab(phi.body),))]
    if rule is RuleId.R_NEG:
        return [drop(RIGHT, principal, (), (lab(phi.body),))]
    if rule is RuleId.L_AT:
        return [drop(LEFT, principal, (lab(phi.body, phi.nominal),))]
    if rule is RuleId.R_AT:
        return [drop(RIGHT, principal, (lab(phi.body, phi.nominal),))]
    j = witness
    if rule in (RuleId.L_BOX, RuleId.R_BOX):
        member = lab(Or(Neg(Rel(i, j)), phi.body), j)
    else:
        member = lab(And(Rel(i, j), phi.body), j)
    return [drop(side, principal, (member,))]


# --------------------------------------------------------------------------
# proof trees

@dataclass(frozen=True)
class ProofTree:
    conclusion: Sequent
    rule: RuleId
    principal: LabeledFormula | None = None
    witness: str | None = None
    premises: tuple["ProofTree", ...] = ()

    def nodes(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.premises))

    @property
    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    @property
    def height(self) -> int:
        return 1 + max((p.height for p in self.premises), default=0)

    def rules_used(self) -> set[RuleId]:
        return {n.rule for n in self.nodes()}

    def nominals(self) -> frozenset[str]:
        out: set[str] = set()
        for n in self.nodes():
            out |= n.conclusion.nominals()
            if n.witness is not None:
                out.add(n.witness)
        return frozenset(out)

    def rename(self, mapping) -> "ProofTree":
        """Rename nominals throughout, witnesses included."""
        return ProofTree(
            self.conclusion.rename(mapping), self.rule,
            None if self.principal is None else self.principal.rename(mapping),
            None if self.witness is None else mapping.get(self.witness, self.witness),
            tuple(p.rename(mapping) for p in self.premises))

    def to_dict(self) -> dict:
        return {
            "conclusion": self.conclusion.text(),
            "rule": self.rule.value,
            "principal": None if self.principal is None else self.principal.text(),
            "witness": self.witness,
            "premises": [p.to_dict() for p in self.premises],
        }

    @classmethod
    def from_dict(cls, data: dict, nominals=()) -> "ProofTree":
        nominals = frozenset(nominals)
        principal = data.get("principal")
        return cls(
            parse_sequent(data["conclusion"], nominals=nominals),
            RuleId.parse(data["rule"]),
            None if principal is None else parse_labeled(principal, nominals=nominals),
            data.get("witness"),
            tuple(cls.from_dict(p, nominals) for p in data.get("premises", [])),
        )

    def to_json(self, indent: int | None = 2) -> str:
        doc = {"nominals": sorted(self.nominals()), "proof": self.to_dict()}
        return json.dumps(doc, indent=indent, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "ProofTree":
        doc = json.loads(text)
        return cls.from_dict(doc["proof"], doc.get("nominals", ()))

    def pretty(self, unicode: bool = True) -> str:
        """Indented rendering, conclusion first."""
        lines = []

        def walk(node, depth):
            tag = node.rule.value + (f"[{node.witness}]" if node.witness else "")
            lines.append(f"{'  ' * depth}{node.conclusion.text(unicode)}    ({tag})")
            for p in node.premises:
                walk(p, depth + 1)

        walk(self, 0)
        return "\n".join(lines)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of check_proof; falsy on failure, with a diagnostic."""

    ok: bool
    kind: str | None = None
    message: str = ""
    path: tuple[int, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.ok


def check_proof(tree: ProofTree) -> CheckResult:
    """Independently re-derive every node of ``tree`` with apply_rule.

    ``path`` in a failed result lists premise indices from the root down to
    the offending node.
    """
    stack = [(tree, ())]
    while stack:
        node, path = stack.pop()
        s = node.conclusion
        if node.rule is not RuleId.U and not s.labelled:
            return CheckResult(False, "unlabelled", "unlabelled formula below the root goal", path)
        if node.rule is RuleId.V:
            if node.premises:
                return CheckResult(False, "arity", "V is a leaf rule", path)
            if not s.labelled or not s.elementary:
                return CheckResult(False, "not-elementary", f"V applied to {s}", path)
            if not elementary_valid(s):
                return CheckResult(False, "invalid-axiom", f"{s} is not valid", path)
            continue
        try:
            expected = apply_rule(s, node.rule, node.principal, node.witness)
        except RuleError as e:
            return CheckResult(False, e.kind, str(e), path)
        if len(expected) != len(node.premises):
            return CheckResult(False, "arity",
                               f"{node.rule.value} has {len(expected)} premises, "
                               f"tree gives {len(node.premises)}", path)
        for k, (want, got) in enumerate(zip(expected, node.premises)):
            if want != got.conclusion:
                return CheckResult(False, "premise-mismatch",
                                   f"expected {want}, found {got.conclusion}", path + (k,))
        for k in reversed(range(len(node.premises))):
            stack.append((node.premises[k], path + (k,)))
    return CheckResult(True)


def derived_r_imp(conclusion: Sequent, principal: LabeledFormula, above: ProofTree) -> ProofTree:
    """Expand the derived rule ``Γ, i:φ ⊢ i:ψ, Δ / Γ ⊢ i:φ→ψ, Δ``.

    The expansion is CR, then R→1 on one copy, then R→2 on the other, with
    ``above`` proving the top sequent.
    """
    (s1,) = apply_rule(conclusion, RuleId.CR, principal)
    (s2,) = apply_rule(s1, RuleId.R_IMP1, principal)
    (s3,) = apply_rule(s2, RuleId.R_IMP2, principal)
    if s3 != above.conclusion:
        raise RuleShapeError(f"derived R→ yields {s3}, not {above.conclusion}")
    return ProofTree(conclusion, RuleId.CR, principal, None, (
        ProofTree(s1, RuleId.R_IMP1, principal, None, (
            ProofTree(s2, RuleId.R_IMP2, principal, None, (above,)),)),))

