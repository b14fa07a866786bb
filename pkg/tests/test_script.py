import pytest

from ltr.exprs import (SKIP, Concat, Fold, FormulaT, GetRules, Head, Just, MapGet, MetaVarE, PPred,
                       PVar, RuleSeq, RuleT, Select, Seq, SetRules, Skip, Var, mklist, plist)
from ltr.model import mv
from ltr.script import parse_script, print_expr
from ltr.stdlib import ASSETS, load_fixture, read_asset
from ltr.syntax import ParseError


@pytest.fixture(scope="module")
def stlc():
    return load_fixture("stlc")


def test_sequence():
    assert parse_script("skip ; skip") == Seq(Skip(), Skip())


def test_keep_selector_with_formula_pattern(stlc):
    e = parse_script("getRules(keep)[(|- [G, e, T])]: just self", stlc)
    assert isinstance(e, Select) and e.keep
    assert isinstance(e.lst, GetRules)
    assert e.pattern == PPred("|-", plist([PVar("G"), PVar("e"), PVar("T")]))


def test_fold_of_list_literal():
    e = parse_script("fold <: [?T1, ?T2]")
    assert e == Fold("<:", mklist([MetaVarE(mv("T1")), MetaVarE(mv("T2"))]))


def test_fold_call_form():
    assert parse_script("fold(<:, [?T1, ?T2])") == parse_script("fold <: [?T1, ?T2]")


def test_let_expands_to_selector():
    e = parse_script("let x = skip in x")
    assert e == Head(Select(mklist([SKIP]), PVar("x"), Just(Var("x"))))


def test_glued_call_is_map_lookup():
    e = parse_script("m(k)")
    assert e == MapGet(Var("m"), Var("k"))


def test_spaced_call_is_not_lookup():
    # a template argument list, not a lookup
    e = parse_script("(arrow ?A ?B)", load_fixture("stlc"))
    assert not isinstance(e, MapGet)


def test_rule_template_and_rule_seq(stlc):
    e = parse_script("(nil --- conclusion) ;r self", stlc)
    assert isinstance(e, RuleSeq) and isinstance(e.first, RuleT)


def test_infix_formula_template(stlc):
    e = parse_script("?A <: ?B", stlc)
    assert e == FormulaT("<:", mklist([MetaVarE(mv("A")), MetaVarE(mv("B"))]))


def test_concat_is_core_node():
    assert isinstance(parse_script("concat(nil)"), Concat)


def test_unterminated_is_parse_error():
    with pytest.raises(ParseError) as info:
        parse_script("setRules (")
    assert info.value.span.line == 1


def test_empty_script_is_parse_error():
    with pytest.raises(ParseError):
        parse_script("   # only a comment\n")


def test_duplicate_pattern_binder_is_parse_error():
    with pytest.raises(ParseError):
        parse_script("nil[cons(x, x)]: nothing")


@pytest.mark.parametrize("name", sorted(ASSETS))
def test_assets_parse(name, stlc):
    lang = stlc.declare(preds=ASSETS[name].extra_preds)
    e = parse_script(read_asset(ASSETS[name].filename), lang)
    assert isinstance(e, SetRules) or isinstance(e, Seq)


@pytest.mark.parametrize("src", [
    "skip ; skip",
    "setRules getRules",
    "fold <: [?T1, ?T2]",
    "if isEmpty(nil) then skip else error",
    "setRules (getRules[r]: just r)",
])
def test_print_parse_round_trip(src, stlc):
    e = parse_script(src, stlc)
    assert parse_script(print_expr(e), stlc) == e
