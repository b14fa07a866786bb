import pytest

from ltr.model import Constructor, mv
from ltr.stdlib import (ASSETS, all_ops_map, asset_add_subtyping, asset_big_step,
                        asset_explicit_equality, load_fixture)
from ltr.syntax import parse_language

from oracles import equal_up_to_renaming, find_rule, rules_from_text
from support import run_asset

TRIPLE = """ops: triple
preds: -->

(triple e e e) --> v
---
(triple e e e) --> v
"""


def test_add_subtyping_leaves_rules_without_repeats():
    stlc = load_fixture("stlc")
    _, out = run_asset("add-subtyping", stlc)
    lam_in = [r for r in stlc.rules if "lam" in str(r.conclusion)]
    # the abstraction rule has no repeated output variable
    assert all(r in out.rules for r in lam_in)
    assert len(out.rules) == len(stlc.rules)
    assert not any(f.pred == "<:" for r in lam_in for f in r.premises)


def test_add_subtyping_on_pairs_keeps_pair_rule():
    lang = load_fixture("stlc_pairs")
    _, out = run_asset("add-subtyping", lang)
    assert len(out.rules) == len(lang.rules)
    for r in out.rules:
        for f in r.premises:
            assert f.pred in ("|-", "<:", "=", "join", "lookup", "-->")


def test_add_subtyping_requires_maps():
    with pytest.raises(KeyError):
        ASSETS["add-subtyping"].prepare(load_fixture("stlc"))
    assert asset_add_subtyping({}, {}).missing_maps() == []


def test_explicit_equality_on_repeated_arguments():
    lang = parse_language(TRIPLE)
    prepared, out = run_asset("explicit-equality", lang, maps={})
    (r,) = out.rules
    (want,) = rules_from_text("""
(triple e1 e2 e3) --> v
e1 = e2
e2 = e3
---
(triple e e e) --> v
""", prepared)
    assert equal_up_to_renaming(r, want, fixed=[mv("v"), mv("e")])


def test_explicit_equality_noop_on_distinct_variables():
    lang = load_fixture("stlc_if")
    _, out = run_asset("explicit-equality", lang, maps={})
    assert out.rules == lang.rules


def test_explicit_equality_empty_premises():
    lang = parse_language("preds: -->\n---\nv --> v\n")
    _, out = run_asset("explicit-equality", lang, maps={})
    assert out.rules == lang.rules


def test_all_ops_map():
    m = all_ops_map(load_fixture("stlc"))
    assert m["arrow"] == ("yes", "yes") and m["app"] == ("yes", "yes")
    assert "B" not in m and "tt" not in m


def test_big_step_drops_contextual_and_adds_value_steps():
    lang = load_fixture("stlc_pairs")
    prepared, out = run_asset("big-step", lang)
    assert not any("plug" in str(r) for r in out.rules)
    values = rules_from_text("""
---
(lam (bind x e)) --> (lam (bind x e))

---
(pair v v) --> (pair v v)
""", prepared)
    for want in values:
        assert find_rule(out.rules, want, fixed=[mv("x"), mv("e"), mv("v")])


def test_big_step_projection_rule():
    lang = load_fixture("stlc_pairs")
    prepared, out = run_asset("big-step", lang)
    fst_rules = [r for r in out.rules
                 if isinstance(r.conclusion.args[0], Constructor) and r.conclusion.args[0].op == "fst"]
    (want,) = rules_from_text("""
e' --> (pair v1 v2)
v1 --> r
---
(fst e') --> r
""", prepared)
    assert len(fst_rules) == 1
    assert equal_up_to_renaming(fst_rules[0], want, fixed=[mv("v1"), mv("v2")])


def test_asset_constructors():
    assert asset_big_step().name == "big-step"
    assert asset_explicit_equality().missing_maps() == ["allOps"]
    assert asset_explicit_equality({"f": ("yes",)}).missing_maps() == []
