import random

import pytest
from hypothesis import given, settings, strategies as st

from mldd.formula import (
    BOT, TOP, And, Box, CountEQ, CountGE, CountLE, DD, Diamond, Diff, DialectError,
    Implies, LogicDialect, NomAtom, Not, Or, PropAtom, SatOp, Somewhere, Univ,
    connectives, dd_set, dialect_of, expand_counting, in_dialect, is_boolean_dd,
    is_nnf, modal_depth, nnf, require_dialect, subformulas, to_core,
)
from mldd.generate import FormulaGenerator
from mldd.kripke import extension
from mldd.oracle import EnumerationSpec, equivalent_upto
from mldd.syntax import ParseError, parse, to_text

p, q, r = PropAtom("p"), PropAtom("q"), PropAtom("r")


@pytest.mark.parametrize("text, tree", [
    ("@[p] q", DD(p, q)),
    ("<> (p | <> q)", Diamond(Or(p, Diamond(q)))),
    ("E>=2 p", CountGE(2, p)),
    ("E<=0 ~p", CountLE(0, Not(p))),
    ("E=3 true", CountEQ(3, TOP)),
    ("@'i p", SatOp("i", p)),
    ("'i | <>'i", Or(NomAtom("i"), Diamond(NomAtom("i")))),
    ("A p -> E q -> D r", Implies(Univ(p), Implies(Somewhere(q), Diff(r)))),
    ("p & q | r", Or(And(p, q), r)),
    ("p | q & r", Or(p, And(q, r))),
    ("~p & []q", And(Not(p), Box(q))),
    ("@[p | q] ~r & p", And(DD(Or(p, q), Not(r)), p)),
    ("false", BOT),
])
def test_parse(text, tree):
    assert parse(text) == tree


@pytest.mark.parametrize("tree, text", [
    (DD(TOP, TOP), "@[true] true"),
    (Not(p), "~p"),
    (CountEQ(2, TOP), "E=2 true"),
    (And(CountEQ(1, p), CountEQ(1, And(p, q))), "E=1 p & E=1 (p & q)"),
    (Implies(Implies(p, q), r), "(p -> q) -> r"),
    (Implies(p, Implies(q, r)), "p -> q -> r"),
    (Or(p, Or(q, r)), "p | (q | r)"),
    (Or(Or(p, q), r), "p | q | r"),
])
def test_print(tree, text):
    assert to_text(tree) == text


@pytest.mark.parametrize("text", ["E>= p", "p &", "(p", "@[p q", "X", "p q", "E>=x p", "@' p", ""])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse("p & & q")
    assert info.value.pos == 4


def test_counting_rejects_negative():
    with pytest.raises(ValueError):
        CountGE(-1, p)


@pytest.mark.parametrize("text, depth", [
    ("p", 0), ("<>(p | <>q)", 2), ("@[<>p] q", 1), ("[]<>p", 2), ("E>=2 <>p", 1), ("A []p", 1),
])
def test_modal_depth(text, depth):
    assert modal_depth(parse(text)) == depth


def test_subformulas_examples():
    assert subformulas(p) == {p}
    assert subformulas(DD(p, q)) == {DD(p, q), p, q}
    f = Diamond(And(p, q))
    assert subformulas(f) == {f, And(p, q), p, q}


def test_dd_set_examples():
    assert dd_set(parse("@[p]q & @[<>p]true")) == {p, Diamond(p)}
    assert dd_set(parse("<>p")) == frozenset()
    assert dd_set(parse("@[p] @[q] r")) == {p, q}


@pytest.mark.parametrize("text, expected", [
    ("@[p | ~q] r", True), ("@[<>p] q", False), ("<><>p", True), ("@[@[p]q] r", False),
])
def test_is_boolean_dd(text, expected):
    assert is_boolean_dd(parse(text)) is expected


def test_dialects():
    assert dialect_of(parse("<>p")) is LogicDialect.ML
    assert dialect_of(parse("@[true] true")) is LogicDialect.MLDD
    assert dialect_of(parse("@'i p")) is LogicDialect.H_AT
    assert dialect_of(parse("E>=2 p")) is LogicDialect.MLC
    assert dialect_of(parse("A p & E q")) is LogicDialect.ML_A
    assert dialect_of(parse("D p")) is None
    assert in_dialect(parse("<>p"), LogicDialect.MLDD)
    with pytest.raises(DialectError):
        require_dialect(parse("'i"), LogicDialect.MLDD)


@pytest.mark.parametrize("text, expected", [
    ("~A p", "E ~p"), ("~(p | <>q)", "~p & []~q"), ("~~p", "p"), ("~[]p", "<>~p"),
    ("p -> q", "~p | q"), ("~true", "false"),
])
def test_nnf(text, expected):
    assert nnf(parse(text)) == parse(expected)


def test_nnf_rejects_other_dialects():
    with pytest.raises(DialectError):
        nnf(parse("@[p] q"))


def test_to_core_connectives():
    core = to_core(parse("p & q -> []false"))
    kinds = {type(g) for g in subformulas(core)}
    assert kinds <= {PropAtom, type(TOP), Not, Or, Diamond}


def test_expand_counting():
    assert expand_counting(CountLE(1, p)) == Not(CountGE(2, p))
    assert expand_counting(CountEQ(1, p)) == And(CountGE(1, p), Not(CountGE(2, p)))


def _ml_a(seed, count):
    gen = FormulaGenerator(random.Random(seed), LogicDialect.ML_A, props=("p", "q"),
                           max_depth=2, max_connectives=8)
    return [gen() for _ in range(count)]


def test_nnf_stable_and_equivalent():
    spec = EnumerationSpec(3, ("p", "q"))
    for f in _ml_a(11, 40):
        g = nnf(f)
        assert is_nnf(g)
        assert nnf(g) == g
        assert connectives(g) <= 2 * connectives(f) + 1
        assert equivalent_upto(f, g, spec).equivalent, to_text(f)


def _all_dialect_generator(seed):
    return FormulaGenerator(random.Random(seed), LogicDialect.H_AT, props=("p", "q", "r1"),
                            nominals=("i", "j_2"), max_depth=3, max_connectives=14,
                            extra=("dd", "ge", "le", "eq", "univ", "somewhere", "diff"))


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_round_trip_property(seed):
    f = _all_dialect_generator(seed)()
    assert parse(to_text(f)) == f


def test_round_trip_whitespace_and_parens():
    f = parse("( ( p ) & ( <> ( q ) ) )")
    assert to_text(f) == "p & <>q"
    assert parse("  @[ p ]q  ") == DD(p, q)


def test_dd_set_inside_subformulas():
    gen = FormulaGenerator(random.Random(3), LogicDialect.MLDD, max_connectives=12)
    for _ in range(200):
        f = gen()
        subs = subformulas(f)
        assert dd_set(f) <= subs


def test_box_is_dual_in_evaluation():
    from mldd.kripke import KripkeModel
    m = KripkeModel(("a", "b"), {("a", "b")}, {"p": {"b"}})
    assert list(extension(m, Box(p))) == list(extension(m, Not(Diamond(Not(p)))))
