import pytest

from hybridgames.calculus import LabeledFormula, Sequent, parse_labeled, parse_sequent
from hybridgames.syntax import Box, Nom, ParseError, Prop, Rel, parse


def test_parse_labelled_sequent():
    s = parse_sequent("i: [](p & q), j: R(i,j) |- j: p")
    assert s.left == (LabeledFormula("i", parse("[](p & q)")), LabeledFormula("j", Rel("i", "j")))
    assert s.right == (LabeledFormula("j", Prop("p")),)


def test_unicode_turnstile_and_empty_sides():
    assert parse_sequent("⊢ i: □p") == Sequent((), (LabeledFormula("i", Box(Prop("p"))),))
    assert parse_sequent("i: p |-") == Sequent((LabeledFormula("i", Prop("p")),), ())
    assert parse_sequent("|-") == Sequent()


def test_labels_force_nominals():
    # "a" is a label, so the bare "a" on the right is a nominal too
    s = parse_sequent("a: p |- i: a")
    assert s.right[0].formula == Nom("a")


def test_unlabelled_goal():
    s = parse_sequent("|- []p -> p")
    assert s.right[0].label is None and not s.labelled


def test_multiset_equality_ignores_order():
    a = parse_sequent("i: p, j: q, i: p |- k: r")
    b = parse_sequent("j: q, i: p, i: p |- k: r")
    assert a == b and hash(a) == hash(b)
    assert a != parse_sequent("i: p, j: q |- k: r")
    assert a.count("left", LabeledFormula("i", Prop("p"))) == 2


def test_text_round_trip():
    s = parse_sequent("i: [](p & q), j: ~R(i,j) | p |- j: <>p, @k q")
    assert parse_sequent(s.text(), nominals=s.nominals()) == s
    assert parse_sequent(s.text(unicode=True), nominals=s.nominals()) == s


def test_nominals_and_elementary():
    s = parse_sequent("i: R(j,k) |- l: p")
    assert s.nominals() == {"i", "j", "k", "l"}
    assert s.elementary
    assert not parse_sequent("i: ~p |-").elementary


def test_replace_removes_one_copy():
    s = parse_sequent("i: p, i: p |- j: q")
    t = s.replace("left", LabeledFormula("i", Prop("p")), add_other=[LabeledFormula("i", Prop("r"))])
    assert t == parse_sequent("i: p |- j: q, i: r")


def test_rename():
    s = parse_sequent("i: <>j |- j: R(i,j)")
    assert s.rename({"j": "k"}) == parse_sequent("i: <>k |- k: R(i,k)")


@pytest.mark.parametrize("text", ["i: p", "i: p |- |- j: q", "i: |- p", "i: p, |- q"])
def test_sequent_parse_errors(text):
    with pytest.raises(ParseError):
        parse_sequent(text)


def test_parse_labeled():
    assert parse_labeled("i: <>p") == LabeledFormula("i", parse("<>p"))
    with pytest.raises(ParseError):
        parse_labeled("i: p, j: q")
