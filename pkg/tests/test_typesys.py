import pytest

from ltr.evaluator import check_language_structural
from ltr.exprs import GETRULES, NIL, SKIP, Just, PHeadVar, PPred, PVar, PWild, Select, Var, plist
from ltr.model import MetaVar
from ltr.script import parse_script
from ltr.stdlib import ASSETS, load_fixture
from ltr.ttypes import (ANY, FORMULA, LANGUAGE, OPNAME, PREDNAME, RULE, STRING, TERM, ListT, MapT,
                        MaybeT, type_equal)
from ltr.typesys import (ConfigError, TransformTypeError, elaborate, typecheck_config,
                         typecheck_expr, typecheck_pattern)


@pytest.fixture(scope="module")
def stlc():
    return load_fixture("stlc")


def test_skip_is_language():
    assert typecheck_expr({}, SKIP) == LANGUAGE


def test_get_rules():
    assert typecheck_expr({}, GETRULES) == ListT(RULE)


def test_rule_selector():
    e = Select(GETRULES, PVar("r"), Just(Var("self")))
    assert typecheck_expr({}, e) == ListT(RULE)


def test_selector_elaboration_records_rule_elements():
    _, e = elaborate(Select(GETRULES, PWild(), Just(Var("conclusion"))))
    assert e.rule_elems is True
    _, e = elaborate(parse_script("let x = nil in x"))
    assert e.e.rule_elems is False


def test_formula_pattern_binds_terms():
    p = PPred("|-", plist([PVar("g"), PVar("e"), PVar("t")]))
    assert typecheck_pattern({}, p, FORMULA) == {"g": TERM, "e": TERM, "t": TERM}


def test_var_pattern():
    assert typecheck_pattern({}, PVar("x"), RULE) == {"x": RULE}


def test_head_variable_pattern_binds_opname():
    assert typecheck_pattern({}, PHeadVar("op", PWild()), TERM) == {"op": OPNAME}


def test_head_variable_already_bound_is_reference():
    assert typecheck_pattern({"op": OPNAME}, PHeadVar("op", PWild()), TERM) == {}


def test_config_ok(stlc):
    typecheck_config(frozenset(), stlc, SKIP, check_language_structural)


def test_config_disjointness(stlc):
    with pytest.raises(ConfigError) as info:
        typecheck_config(frozenset({MetaVar("T")}), stlc, SKIP)
    assert info.value.kind == "disjointness"


def test_config_requires_language(stlc):
    with pytest.raises(ConfigError) as info:
        typecheck_config(frozenset(), stlc, GETRULES)
    assert info.value.kind == "type"
    assert "expected Language, found List Rule" in str(info.value)


def test_error_message_names_location():
    e = parse_script("setRules skip", file="s.ltr")
    with pytest.raises(TransformTypeError) as info:
        elaborate(e)
    msg = str(info.value)
    assert msg.startswith("s.ltr:1:") and "expected List Rule, found Language" in msg


def test_unbound_variable():
    with pytest.raises(TransformTypeError):
        typecheck_expr({}, Var("nope"))


def test_selector_over_unknown_list_shields_rule_names():
    # nil has no element type yet; the body never runs
    e = Select(NIL, PWild(), Just(Var("premises")))
    assert typecheck_expr({}, e) == ListT(ANY)


def test_type_equality():
    assert type_equal(ListT(TERM), ListT(TERM))
    assert not type_equal(MaybeT(TERM), TERM)
    assert not type_equal(MapT(OPNAME, ListT(STRING)), MapT(PREDNAME, ListT(STRING)))


@pytest.mark.parametrize("name", sorted(ASSETS))
def test_assets_are_well_typed(name, stlc):
    lang, e = ASSETS[name].with_maps({"mode": {"|-": ("inp", "inp", "out")},
                                       "variance": {"arrow": ("contra", "cova")}}).prepare(stlc)
    typecheck_config(frozenset(), lang, e, check_language_structural)
