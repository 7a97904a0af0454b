import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridgames.syntax import (And, At, Box, Dia, Imp, NamespaceError, Neg, Nom, Or,
                                ParseError, Prop, Rel, degree, fresh_nominals, is_elementary,
                                nominals_of, parse, props_of, rename_nominals, subformulas,
                                to_text)

nominal = st.sampled_from(["i", "j", "k"])
atoms = st.one_of(
    st.builds(Prop, st.sampled_from(["p", "q", "r"])),
    st.builds(Nom, nominal),
    st.builds(Rel, nominal, nominal),
)
formula = st.recursive(atoms, lambda sub: st.one_of(
    st.builds(And, sub, sub), st.builds(Or, sub, sub), st.builds(Imp, sub, sub),
    st.builds(Neg, sub), st.builds(Box, sub), st.builds(Dia, sub),
    st.builds(At, nominal, sub),
), max_leaves=12)


def test_parse_k_distribution():
    phi = parse("[](p & q) -> ([]p & []q)")
    assert phi == Imp(Box(And(Prop("p"), Prop("q"))), And(Box(Prop("p")), Box(Prop("q"))))
    assert to_text(phi) == "[](p & q) -> ([]p & []q)"
    assert to_text(phi, unicode=True) == "□(p ∧ q) → (□p ∧ □q)"


def test_parse_hybrid_atoms():
    assert parse("@i R(i,j)") == At("i", Rel("i", "j"))
    assert parse("[](j | ~[]p)") == Box(Or(Nom("j"), Neg(Box(Prop("p")))))


def test_unicode_input_matches_ascii():
    assert parse("□(p ∧ q) → ◇¬r") == parse("[](p & q) -> <>~r")


def test_precedence_and_associativity():
    assert parse("p -> q -> r") == Imp(Prop("p"), Imp(Prop("q"), Prop("r")))
    assert parse("p | q & r") == Or(Prop("p"), And(Prop("q"), Prop("r")))
    assert parse("~p & q") == And(Neg(Prop("p")), Prop("q"))
    assert to_text(parse("(p & q) | r")) == "(p & q) | r"
    assert to_text(parse("p & q & r")) == "p & q & r"
    assert to_text(parse("(p -> q) -> r")) == "(p -> q) -> r"


def test_degree():
    assert degree(parse("p")) == 0
    assert degree(parse("R(i,j)")) == 0
    assert degree(parse("[](j | ~[]p)")) == 4
    assert degree(parse("[](p & q) -> ([]p & []q)")) == 6


def test_elementary():
    assert all(is_elementary(parse(s)) for s in ["p", "i", "R(i,j)"])
    assert not is_elementary(parse("~p"))


def test_identifier_classification():
    # forced nominal positions win over the naming convention
    assert parse("a & @a p") == And(Nom("a"), At("a", Prop("p")))
    assert parse("i & p") == And(Nom("i"), Prop("p"))
    assert parse("x", nominals=["x"]) == Nom("x")
    assert parse("i", props=["i"]) == Prop("i")


def test_namespace_clash():
    with pytest.raises(NamespaceError):
        parse("@p q", props=["p"])
    with pytest.raises(NamespaceError):
        parse("p", nominals=["p"], props=["p"])


def test_strict_mode_rejects_undeclared():
    with pytest.raises(ParseError):
        parse("p & q", props=["p"], strict=True)
    assert parse("p & i", nominals=["i"], props=["p"], strict=True) == And(Prop("p"), Nom("i"))


@pytest.mark.parametrize("text", ["p &", "(p", "p q", "[]", "R(i)", "p $ q", "@ p", ""])
def test_parse_errors_carry_position(text):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.position is not None


def test_nominals_and_props():
    phi = parse("@i <>(R(j,k) & p) | q")
    assert nominals_of(phi) == {"i", "j", "k"}
    assert props_of(phi) == {"p", "q"}
    assert len(list(subformulas(phi))) == 7


def test_fresh_nominals_avoid_taken_names():
    assert fresh_nominals({"n1", "n3"}, 3) == ["n2", "n4", "n5"]


def test_rename_nominals():
    phi = parse("@i <>(R(i,j) & j)")
    assert rename_nominals(phi, {"i": "k"}) == parse("@k <>(R(k,j) & j)")


@settings(max_examples=300, deadline=None)
@given(formula)
def test_print_parse_round_trip(phi):
    noms = nominals_of(phi)
    assert parse(to_text(phi), nominals=noms) == phi
    assert parse(to_text(phi, unicode=True), nominals=noms) == phi


@given(formula)
def test_hash_agrees_with_equality(phi):
    twin = parse(to_text(phi), nominals=nominals_of(phi))
    assert twin == phi and hash(twin) == hash(phi)
