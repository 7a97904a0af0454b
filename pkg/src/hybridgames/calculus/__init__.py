"""The sequent calculus DS: rules, checker, proof search and countermodels."""

from .rules import (CheckResult, EigenvariableError, ProofTree, RuleError, RuleId,
                    RuleShapeError, UnionFind, apply_rule, check_proof, derived_r_imp,
                    elementary_countermodel, elementary_valid)
from .search import (BranchState, Countermodel, Proof, SearchConfig, SearchOutcome,
                     Unknown, extract_countermodel, prove)
from .sequent import LEFT, RIGHT, LabeledFormula, Sequent, parse_labeled, parse_sequent

__all__ = [
    "CheckResult", "EigenvariableError", "ProofTree", "RuleError", "RuleId",
    "RuleShapeError", "UnionFind", "apply_rule", "check_proof", "derived_r_imp",
    "elementary_countermodel", "elementary_valid", "BranchState", "Countermodel",
    "Proof", "SearchConfig", "SearchOutcome", "Unknown", "extract_countermodel", "prove",
    "LEFT", "RIGHT", "LabeledFormula", "Sequent", "parse_labeled", "parse_sequent",
]
