import random

import pytest

from mldd.formula import DialectError, LogicDialect, in_dialect, props
from mldd.generate import FormulaGenerator
from mldd.kripke import FrameClass
from mldd.oracle import EnumerationSpec, brute_sat, equivalent_upto, spec_for
from mldd.syntax import parse, to_text
from mldd.translations import (
    FreshSymbolSource, chain_formula, dd_to_mlc, dd_to_mlc_via_diff, hybrid_to_dd,
    mlc_to_dd_linear, univ_to_dd,
)


def T(f):
    return to_text(f)


def same(a, b):
    return T(a) == T(parse(b))


def test_hybrid_examples():
    assert same(hybrid_to_dd(parse("@'i p")), "@[p_i] p & @[p_i] true")
    assert same(hybrid_to_dd(parse("p")), "p")
    assert same(hybrid_to_dd(parse("'i | <>'i")), "(p_i | <>p_i) & @[p_i] true")


def test_dd_to_mlc_examples():
    assert same(dd_to_mlc(parse("@[p] q")), "E=1 p & E=1 (p & q)")
    assert same(dd_to_mlc(parse("<>p")), "<>p")
    assert same(dd_to_mlc(parse("@[true] true")), "E=1 true & E=1 (true & true)")


def test_via_diff_examples():
    assert same(dd_to_mlc_via_diff(parse("@[p] q")),
                "E>=1 (p & q & ~((p -> E>=2 p) & (~p -> E>=1 p)))")
    assert same(dd_to_mlc_via_diff(parse("p")), "p")
    f = parse("@[true] true")
    assert equivalent_upto(dd_to_mlc_via_diff(f), dd_to_mlc(f), EnumerationSpec(4)).equivalent


def test_univ_examples():
    assert same(univ_to_dd(parse("A p")), "@[s | ~p] true & ~s & @[s] true & @[<>s] s")
    assert same(univ_to_dd(parse("E p")), "@[p_p] (p & ~s) & ~s & @[s] true & @[<>s] s")
    assert same(univ_to_dd(parse("p")), "p & ~s & @[s] true & @[<>s] s")


def test_chain_examples():
    assert same(chain_formula(parse("p"), 1), "p")
    assert same(chain_formula(parse("p"), 2), "p & <>p")
    assert same(chain_formula(parse("p"), 3), "p & <>(p & <>p)")
    with pytest.raises(ValueError):
        chain_formula(parse("p"), 0)


def test_linear_examples():
    assert same(mlc_to_dd_linear(parse("E>=2 p")), "<>(p & <>p) | @[(p & <>p) & ~<>(p & <>p)] true")
    assert same(mlc_to_dd_linear(parse("E>=1 p")), "<>p | @[p & ~<>p] true")


def test_dialect_errors():
    with pytest.raises(DialectError):
        dd_to_mlc(parse("E>=1 p"))
    with pytest.raises(DialectError):
        univ_to_dd(parse("@[p] q"))
    with pytest.raises(DialectError):
        hybrid_to_dd(parse("A p"))


def test_fresh_names_avoid_collisions():
    out = univ_to_dd(parse("A s & E (s | p_s) & E p_s"))
    fresh = props(out) - {"s", "p_s"}
    assert fresh and not (fresh & {"s", "p_s"})
    assert "s1" in fresh
    src = FreshSymbolSource({"s", "s1"})
    assert src.fresh("s") == "s2" and src.fresh("s") == "s3"
    h = hybrid_to_dd(parse("@'i p_i"))
    assert "p_i" in props(h) and len(props(h)) == 2


def test_outputs_in_target_dialect():
    rng = random.Random(1)
    gen = FormulaGenerator(rng, LogicDialect.MLDD)
    for _ in range(50):
        f = gen()
        assert in_dialect(dd_to_mlc(f), LogicDialect.MLC)
    gen = FormulaGenerator(rng, LogicDialect.ML_A)
    for _ in range(50):
        assert in_dialect(univ_to_dd(gen()), LogicDialect.MLDD)


def test_hybrid_equisatisfiable():
    rng = random.Random(3)
    gen = FormulaGenerator(rng, LogicDialect.H_AT, props=("p",), nominals=("i",), max_connectives=6)
    for _ in range(40):
        f = gen()
        image = hybrid_to_dd(f)
        a = brute_sat(f, spec_for(f, max_worlds=3))
        b = brute_sat(image, spec_for(image, max_worlds=3))
        assert a.found == b.found


def test_hybrid_image_forces_singletons():
    image = hybrid_to_dd(parse("'i | <>'i"))
    res = brute_sat(image, spec_for(image, max_worlds=4))
    assert res.found and len(res.model.valuation["p_i"]) == 1


def test_dd_to_mlc_equivalence_random():
    rng = random.Random(8)
    gen = FormulaGenerator(rng, props=("p",), max_connectives=6)
    spec = EnumerationSpec(3, ("p",))
    for _ in range(40):
        f = gen()
        assert equivalent_upto(f, dd_to_mlc(f), spec).equivalent
        assert equivalent_upto(f, dd_to_mlc_via_diff(f), spec).equivalent


def test_linear_equivalence_nested():
    f = parse("E>=2 (p & E<=1 ~p)")
    spec = spec_for(f, max_worlds=5, frame_class=FrameClass.FINITE_STRICT_TOTAL_ORDER)
    assert equivalent_upto(f, mlc_to_dd_linear(f), spec).equivalent
